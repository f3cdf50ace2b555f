#include <doctest.h>

#include <cmath>
#include <limits>

#include "fraclap/errors.hpp"
#include "fraclap/verify.hpp"

using namespace fraclap;

TEST_CASE("report semantics") {
    VerificationReport r;
    r.suite = "demo";
    r.add("ok", 1.0, 2.0);
    r.record("info", 1e9);
    CHECK(r.passed());
    r.add("nan", std::numeric_limits<double>::quiet_NaN(), 1.0);
    CHECK_FALSE(r.passed());
    r.set("s", 0.5);
    const nlohmann::json j = r.to_json();
    CHECK(j["suite"] == "demo");
    CHECK(j["cases"].size() == 3);
    CHECK(j["passed"] == false);
    CHECK(r.to_text().find("FAIL") != std::string::npos);
}

namespace {
const IntervalDomain kDom(-1.0, 1.0);
const ExteriorWeight kBeta = ExteriorWeight::constant_window(1.0, 0.0, 1.0);
}  // namespace

TEST_CASE("discrete suites pass on a coarse mesh") {
    const Mesh m(kDom, 48);
    const FractionalKernel k(0.5);
    const std::vector<double> t{0.01, 0.1, 1.0};
    CHECK(check_form_ordering(m, k, kDom, kBeta, 1, 20).passed());
    CHECK(check_domination(m, k, kDom, kBeta, t, 1, 10).passed());
    CHECK(check_submarkov(m, k, kDom, kBeta, t, 1, 10).passed());
    CHECK(check_neumann_structure(m, k, kDom, t).passed());
    CHECK(check_mu_counterexample(m, k, kDom, kBeta, 1).passed());
    CHECK(check_exterior_conditions(m, k, kDom, kBeta, 1, 10).passed());
}

TEST_CASE("continuum suites on one bump") {
    const FractionalKernel k(0.5);
    const SmoothFunction u = gaussian_bump(1.0, 0.1, 0.4);
    CHECK(check_divergence_theorem(u, k, kDom).passed());
    CHECK(check_integration_by_parts(u, gaussian_bump(1.0, -0.1, 0.5), k, kDom).passed());
}

TEST_CASE("full-line pairing of Gaussians matches the Fourier value") {
    // int_R e^{-x^2} (-Delta)^{1/2} e^{-x^2} dx = (1/2pi) int |xi| pi e^{-xi^2/2} = 1
    const SmoothFunction g = gaussian_bump(1.0, 0.0, 1.0);
    CHECK(full_line_pairing(g, g, FractionalKernel(0.5), {}) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ultracontractive window needs enough resolution") {
    CHECK_THROWS(ultracontractive_window(Mesh(kDom, 16), 0.5));
    const TimeWindow w = ultracontractive_window(Mesh(kDom, 256), 0.5);
    CHECK(w.t_min > 0.0);
    CHECK(w.t_max > w.t_min);
}
