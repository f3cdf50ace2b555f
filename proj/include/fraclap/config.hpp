#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/assembly.hpp"
#include "fraclap/extensions.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/semigroup.hpp"

namespace fraclap {

// Built-in right-hand sides / initial data. Grammar in README.
struct DatumSpec {
    std::string kind = "constant";  // constant|hat|gaussian|getoor|random|tabulated
    double value = 1.0;             // constant
    double amplitude = 1.0;         // hat, gaussian, random (upper bound)
    double center = 0.0;
    double width = 0.25;            // hat half-width, gaussian width
    double radius = -1.0;           // getoor; < 0 means half the domain length
    std::vector<double> values;     // tabulated nodal values, N+1 of them
    bool remove_mean = false;       // subtract the mean (Neumann compatibility)
};

struct WeightSpec {
    std::string kind = "zero";      // zero|constant_window|algebraic_decay|tabulated
    double c = 1.0;
    double d_min = 0.0;
    double d_max = 1.0;
    double p = 2.0;
    std::vector<double> dist;
    std::vector<double> values;
};

struct MuSpec {
    std::string density = "robin";  // robin|rho|weight
    double factor = 2.0;            // rho: w = factor * C * rho
    WeightSpec weight;              // weight: w given directly
    DofSet dofs = DofSet::all;
};

struct VerifySpec {
    std::vector<std::string> suites;  // empty: all
    int samples = 50;
    int ordering_samples = 100;
    int fields = 20;
    int points = 50;
    std::vector<double> t_grid{0.01, 0.1, 1.0};
    std::vector<double> limit_s{0.9, 0.99, 0.999};
    std::vector<int> getoor_meshes{256, 512};
    double getoor_min_order = 0.5;
};

struct RunConfig {
    double a = -1.0;
    double b = 1.0;
    double truncation = 1.0;
    double s = 0.5;
    int N = 256;
    Flavor flavor = Flavor::dirichlet;
    WeightSpec beta;
    MuSpec mu;
    DatumSpec rhs;
    std::vector<double> times{0.0, 0.01, 0.1, 1.0};
    int spectrum_count = -1;
    MassKind mass = MassKind::lumped;
    std::vector<Flavor> spectrum_flavors;  // empty: the problem flavor
    int exterior_samples = 32;
    QuadratureConfig quad;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    VerifySpec verify;

    IntervalDomain domain() const { return IntervalDomain(a, b, truncation); }
    Mesh mesh() const { return Mesh(a, b, N); }
    FractionalKernel kernel() const { return FractionalKernel(s); }

    // Throws ValidationError naming the violated precondition.
    void validate() const;
    // Canonical "section.key" -> value pairs, sorted; numbers at 17 significant digits.
    std::vector<std::pair<std::string, std::string>> snapshot() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

ExteriorWeight make_weight(const WeightSpec& w);
// Exterior density for the mu form as configured.
ExteriorWeight mu_density(const RunConfig& cfg);
Field make_datum(const DatumSpec& d, const Mesh& mesh, double s, std::uint64_t seed);

std::string format_double(double x);  // %.17g

}  // namespace fraclap
