#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "fraclap/config.hpp"
#include "fraclap/verify.hpp"

namespace fraclap {

// Exit codes shared by every command.
constexpr int kExitOk = 0;
constexpr int kExitFailedChecks = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// Each command validates, computes, writes its artifacts to cfg.out_dir and a
// short key = value summary to `log`. Errors propagate as exceptions.
void cmd_solve(const RunConfig& cfg, std::ostream& log);
void cmd_spectrum(const RunConfig& cfg, std::ostream& log);
void cmd_evolve(const RunConfig& cfg, std::ostream& log);
// true iff every selected suite passed
bool cmd_verify(const RunConfig& cfg, std::ostream& log);

// Canonical suite order; cfg.verify.suites empty selects all of them.
std::vector<std::string> selected_suites(const RunConfig& cfg);
VerificationReport run_suite(const std::string& name, const RunConfig& cfg);

// Runs `command` and maps exceptions to exit codes, printing the message to `err`.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace fraclap
