#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/cli.hpp"
#include "fraclap/config.hpp"
#include "fraclap/errors.hpp"

using namespace fraclap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fraclap_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run(const std::string& cmd, const fs::path& dir, const std::string& ini, const std::string& extra = "") {
    std::ofstream(dir / "run.ini") << ini;
    const std::string line = std::string(FRACLAP_CLI_PATH) + " " + cmd + " --config " + (dir / "run.ini").string() +
                             " --out " + (dir / "out").string() + " " + extra + " > " + (dir / "log.txt").string() +
                             " 2>&1";
    const int status = std::system(line.c_str());
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

// data rows of a CSV, comment lines and header dropped
std::vector<std::vector<double>> rows(const fs::path& p) {
    std::vector<std::vector<double>> out;
    std::ifstream is(p);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(cell.empty() ? 0.0 : std::stod(cell));
        out.push_back(r);
    }
    return out;
}

const char* kDirichlet = "[kernel]\ns = 0.5\n[mesh]\nN = 256\n[problem]\nflavor = dirichlet\nrhs = constant\n";

}  // namespace

TEST_CASE("config grammar") {
    const RunConfig c = parse_config(
        "; comment\n[domain]\na = 0\nb = 2\n[kernel]\ns = 0.25\n[mesh]\nN = 64\n"
        "[problem]\nflavor = robin\n[beta]\nkind = algebraic_decay\nc = 2\np = 3\n"
        "[time]\nt = 0, 0.5\n[run]\nseed = 9\n[verify]\nsuites = mu, ordering\n");
    CHECK(c.b == 2.0);
    CHECK(c.s == 0.25);
    CHECK(c.N == 64);
    CHECK(c.flavor == Flavor::robin);
    CHECK(c.beta.kind == "algebraic_decay");
    CHECK(c.times == std::vector<double>{0.0, 0.5});
    CHECK(c.seed == 9);
    CHECK(selected_suites(c) == std::vector<std::string>{"ordering", "mu"});
    const RunConfig d = parse_config("");
    CHECK(selected_suites(d).size() == 12);
    CHECK(d.snapshot() == parse_config("").snapshot());
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_config("[kernel]\ns = 1.5\n").validate(), ValidationError);
    CHECK_THROWS_AS(parse_config("[mesh]\nN = 3\n").validate(), ValidationError);
    CHECK_THROWS_AS(parse_config("[beta]\nkind = constant_window\nc = -1\n").validate(), ValidationError);
    CHECK_THROWS_AS(parse_config("[mesh]\nM = 12\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("s = 0.5\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[time]\nt = 1, 0.5\n").validate(), ValidationError);
    CHECK_THROWS_AS(parse_config("[verify]\nsuites = everything\n").validate(), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/fraclap.ini"), Error);
}

TEST_CASE("solve writes reproducible artifacts") {
    const fs::path dir = scratch("solve");
    REQUIRE(run("solve", dir, kDirichlet) == kExitOk);
    const std::string csv = slurp(dir / "out" / "solution.csv");
    CHECK(csv.rfind("# fraclap ", 0) == 0);
    CHECK(csv.find("# command = solve") != std::string::npos);
    CHECK(csv.find("region,x,u") != std::string::npos);
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "out" / "solve.json"));
    CHECK(j["closed_form_max_error"].get<double>() < 1e-2);
    REQUIRE(run("solve", dir, kDirichlet) == kExitOk);
    CHECK(slurp(dir / "out" / "solution.csv") == csv);
}

TEST_CASE("invalid input exits with code 2") {
    const fs::path dir = scratch("invalid");
    CHECK(run("solve", dir, "[problem]\nflavor = neumann\nrhs = constant\n") == kExitValidation);
    CHECK(slurp(dir / "log.txt").find("compatibility") != std::string::npos);
    CHECK(run("solve", dir, "[problem]\nflavor = neumann\nrhs = gaussian\ncenter = 0.3\nremove_mean = true\n") ==
          kExitOk);
    CHECK(run("solve", dir, "[kernel]\ns = 1.5\n") == kExitValidation);
    CHECK(run("solve", dir, "[mesh\nN = 8\n") == kExitValidation);
    CHECK(run("transform", dir, kDirichlet) == kExitValidation);
}

TEST_CASE("evolve conserves Neumann mass and does not grow the sup norm") {
    const fs::path dir = scratch("evolve");
    const std::string ini =
        "[mesh]\nN = 64\n[problem]\nflavor = neumann\nrhs = hat\ncenter = 0.2\nwidth = 0.3\n[time]\nt = 0, 0.01, 0.1, 1\n";
    REQUIRE(run("evolve", dir, ini) == kExitOk);
    const auto n = rows(dir / "out" / "norms.csv");
    REQUIRE(n.size() == 4);
    for (size_t i = 1; i < n.size(); ++i) {
        CHECK(std::abs(n[i][1] - n[0][1]) < 1e-10 * std::abs(n[0][1]));
        CHECK(n[i][2] <= n[i - 1][2] + 1e-12);
    }
    const auto e = rows(dir / "out" / "evolve.csv");
    REQUIRE(e.size() == 4 * 65);
    // t = 0 reproduces the hat
    for (int i = 0; i < 65; ++i) {
        const double x = e[i][1];
        CHECK(e[i][2] == doctest::Approx(std::max(0.0, 1.0 - std::abs(x - 0.2) / 0.3)).epsilon(1e-12));
    }
}

TEST_CASE("spectrum lists every requested flavor") {
    const fs::path dir = scratch("spectrum");
    REQUIRE(run("spectrum", dir, "[mesh]\nN = 32\n[spectrum]\ncount = 4\nflavors = dirichlet, neumann\n") == kExitOk);
    const std::string csv = slurp(dir / "out" / "spectrum.csv");
    CHECK(csv.find("k,lambda_dirichlet,lambda_neumann") != std::string::npos);
    const auto r = rows(dir / "out" / "spectrum.csv");
    REQUIRE(r.size() == 4);
    CHECK(std::abs(r[0][2]) < 1e-8);
    CHECK(r[0][1] > 0.5);
    CHECK(run("spectrum", dir, "[mesh]\nN = 8\n[spectrum]\ncount = 12\nflavors = dirichlet\n") == kExitValidation);
}

TEST_CASE("verify runs only the selected suite") {
    const fs::path dir = scratch("verify");
    REQUIRE(run("verify", dir, "[mesh]\nN = 64\n[verify]\nsuites = neumann\n") == kExitOk);
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "out" / "verify.json"));
    REQUIRE(j["reports"].size() == 1);
    CHECK(j["reports"][0]["suite"] == "neumann_structure");
    CHECK(j["passed"] == true);
    const std::string first = slurp(dir / "out" / "verify.json");
    REQUIRE(run("verify", dir, "[mesh]\nN = 64\n[verify]\nsuites = neumann\n") == kExitOk);
    CHECK(slurp(dir / "out" / "verify.json") == first);
}

TEST_CASE("seed override changes random data") {
    const fs::path dir = scratch("seed");
    const std::string ini = "[mesh]\nN = 16\n[problem]\nflavor = dirichlet\nrhs = random\n";
    REQUIRE(run("solve", dir, ini, "--seed 1") == kExitOk);
    const std::string a = slurp(dir / "out" / "solution.csv");
    REQUIRE(run("solve", dir, ini, "--seed 2") == kExitOk);
    CHECK(slurp(dir / "out" / "solution.csv") != a);
    REQUIRE(run("solve", dir, ini, "--seed 1") == kExitOk);
    CHECK(slurp(dir / "out" / "solution.csv") == a);
}
