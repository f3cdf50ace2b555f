// fraclap solve|spectrum|evolve|verify --config <path> [--out <dir>] [--seed <u64>]
#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "fraclap/cli.hpp"
#include "fraclap/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fractional Laplacian with Dirichlet, Neumann and Robin exterior conditions on an interval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fraclap::build_describe());

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    for (const char* name : {"solve", "spectrum", "evolve", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "INI config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [run] out)");
        sub->add_option("--seed", seed, "RNG seed (overrides [run] seed)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fraclap::kExitValidation;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    const CLI::App* sub = app.get_subcommands().front();

    fraclap::RunConfig cfg;
    try {
        cfg = fraclap::load_config(config_path);
    } catch (const fraclap::Error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return fraclap::kExitValidation;
    }
    if (sub->count("--out")) cfg.out_dir = out_dir;
    if (sub->count("--seed")) cfg.seed = seed;
    return fraclap::run_command(command, cfg, std::cout, std::cerr);
}
