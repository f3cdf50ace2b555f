#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/assembly.hpp"
#include "fraclap/extensions.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/semigroup.hpp"

namespace fraclap {

struct VerificationCase {
    std::string description;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string suite;
    std::vector<VerificationCase> cases;
    std::map<std::string, std::string> config;
    std::vector<std::string> notes;

    // pass iff measured <= bound (NaN fails)
    void add(const std::string& description, double measured, double bound);
    // informational entry; never fails
    void record(const std::string& description, double measured);
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::string& value);
    bool passed() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

std::string build_describe();

// ---- oracle pipelines on smooth global functions ----

// int_Omega v (-Delta)^s u dx via the pointwise second-difference formula.
double interior_laplacian_integral(const SmoothFunction& u, const std::function<double(double)>& v,
                                   const FractionalKernel& kernel, const IntervalDomain& domain,
                                   const QuadratureConfig& quad);

// int_{R \ Omega} v N^s u dy, with the boundary-layer part of N^s u integrated in closed form.
double exterior_flux(const SmoothFunction& u, const std::function<double(double)>& v,
                     const FractionalKernel& kernel, const IntervalDomain& domain, const QuadratureConfig& quad);

// E(u,v) = C/2 int int_{R^2 \ (Omega^c)^2} (u(x)-u(y))(v(x)-v(y)) |x-y|^{-1-2s}
double form_energy(const SmoothFunction& u, const SmoothFunction& v, const FractionalKernel& kernel,
                   const IntervalDomain& domain, const QuadratureConfig& quad, int panels = 8);

// int_R v (-Delta)^s u dx over the whole line (u, v decaying)
double full_line_pairing(const SmoothFunction& u, const SmoothFunction& v, const FractionalKernel& kernel,
                         const QuadratureConfig& quad);

// E(w,w) for w = u on Omega and its extension outside, by direct quadrature.
double extended_energy(const ExtendedField& w, const FractionalKernel& kernel, const IntervalDomain& domain,
                       const QuadratureConfig& quad);

// ---- suites ----

VerificationReport check_divergence_theorem(const SmoothFunction& u, const FractionalKernel& kernel,
                                            const IntervalDomain& domain, const QuadratureConfig& quad = {});

VerificationReport check_integration_by_parts(const SmoothFunction& u, const SmoothFunction& v,
                                              const FractionalKernel& kernel, const IntervalDomain& domain,
                                              const QuadratureConfig& quad = {});

VerificationReport check_s_to_one_limit(const SmoothFunction& u, const SmoothFunction& v,
                                        const IntervalDomain& domain, const std::vector<double>& s_grid,
                                        const QuadratureConfig& quad = {});

VerificationReport check_form_ordering(const Mesh& mesh, const FractionalKernel& kernel,
                                       const IntervalDomain& domain, const ExteriorWeight& beta,
                                       std::uint64_t seed, int samples = 100);

VerificationReport check_domination(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                                    const ExteriorWeight& beta, const std::vector<double>& t_grid,
                                    std::uint64_t seed, int samples = 50);

VerificationReport check_submarkov(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                                   const ExteriorWeight& beta, const std::vector<double>& t_grid,
                                   std::uint64_t seed, int samples = 50);

VerificationReport check_neumann_structure(const Mesh& mesh, const FractionalKernel& kernel,
                                           const IntervalDomain& domain, const std::vector<double>& t_grid);

struct TimeWindow {
    double t_min = 0.0;
    double t_max = 0.0;
};

// Window where the discrete heat kernel follows the continuum small-time rate:
// length scale t^{1/(2s)} between 16 h and |Omega| / 8.
// Pass consistent-mass semigroups: the lumped-mass kernel overshoots the continuum
// by ~1e3 (h/l)^2 at s = 0.25, which bends the fit.
TimeWindow ultracontractive_window(const Mesh& mesh, double s);

double fitted_loglog_slope(const SpectralSemigroup& sg, const TimeWindow& window, int samples = 12);

VerificationReport check_ultracontractivity(const std::vector<SpectralSemigroup>& sgs, double s,
                                            const TimeWindow& window);

VerificationReport check_extension_minimality(const Mesh& mesh, const FractionalKernel& kernel,
                                              const IntervalDomain& domain, const ExteriorWeight& beta,
                                              std::uint64_t seed, int fields = 20,
                                              const QuadratureConfig& quad = {});

VerificationReport check_mu_counterexample(const Mesh& mesh, const FractionalKernel& kernel,
                                           const IntervalDomain& domain, const ExteriorWeight& beta,
                                           std::uint64_t seed);

// Dirichlet solve of f = 1 on (-1,1) against c (1-x^2)_+^s. The max-norm order is
// limited by the boundary layer, roughly min(s, 1/2); min_order applies to each refinement.
VerificationReport check_getoor(double s, const std::vector<int>& meshes, double min_order = 0.5,
                                double max_error = 5e-2);

VerificationReport check_exterior_conditions(const Mesh& mesh, const FractionalKernel& kernel,
                                             const IntervalDomain& domain, const ExteriorWeight& beta,
                                             std::uint64_t seed, int points = 50,
                                             const QuadratureConfig& quad = {});

}  // namespace fraclap
