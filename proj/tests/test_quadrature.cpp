#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fraclap/errors.hpp"
#include "fraclap/kernels.hpp"
#include "fraclap/quadrature.hpp"
#include "oracles.hpp"

using namespace fraclap;

TEST_CASE("gauss_legendre matches the independent rule") {
    for (int n : {1, 5, 16, 33}) {
        const GaussRule& r = gauss_legendre(n);
        const auto [x, w] = oracle::gauss(n);
        REQUIRE(r.x.size() == static_cast<size_t>(n));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += r.w[i];
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
        // exact up to degree 2n-1
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += r.w[i] * std::pow(r.x[i], 2 * n - 2);
        CHECK(m == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
        double m_ref = 0.0;
        for (int i = 0; i < n; ++i) m_ref += w[i] * std::pow(x[i], 2 * n - 2);
        CHECK(m == doctest::Approx(m_ref).epsilon(1e-13));
    }
    CHECK_THROWS(gauss_legendre(0));
    CHECK_THROWS(gauss_legendre(65));
}

TEST_CASE("adaptive, graded and half-line rules") {
    QuadratureConfig q;
    q.rel_tol = 1e-12;
    CHECK(integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, q) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(integrate_graded([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q, true) ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(integrate_graded([](double x) { return std::pow(1.0 - x, -0.75); }, 0.0, 1.0, q, false) ==
          doctest::Approx(4.0).epsilon(1e-9));
    CHECK(integrate_to_infinity([](double x) { return 1.0 / ((1.0 + x) * (1.0 + x)); }, 0.0, 1.0, q) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate_half_line([](double e) { return std::exp(-e) * (e < 2.0 ? 1.0 : 2.0); }, 1.0, {2.0}, q) ==
          doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("tighter tolerance does not increase the error") {
    auto f = [](double x) { return std::pow(x, -0.3) * std::cos(5 * x); };
    QuadratureConfig lo, hi;
    lo.rel_tol = 1e-5;
    hi.rel_tol = 1e-11;
    QuadratureConfig ref;
    ref.rel_tol = 1e-14;
    const double exact = integrate_graded(f, 0.0, 2.0, ref, true);
    CHECK(std::abs(integrate_graded(f, 0.0, 2.0, hi, true) - exact) <=
          std::abs(integrate_graded(f, 0.0, 2.0, lo, true) - exact) + 1e-15);
}

TEST_CASE("pair_integral on identical, touching and separated panels") {
    QuadratureConfig q;
    q.rel_tol = 1e-11;
    const double e = 1.5, H = 0.5;
    auto sq = [](double x, double y) { return (x - y) * (x - y); };
    // int_0^H int_0^H |x-y|^{2-e} = 2 H^{4-e} / ((3-e)(4-e))
    CHECK(pair_integral(sq, Panel{0.0, H}, Panel{0.0, H}, e, q) ==
          doctest::Approx(2.0 * std::pow(H, 4 - e) / ((3 - e) * (4 - e))).epsilon(1e-9));
    // touching: int_0^1 int_1^2 (y-x)^{2-e}
    const double p = 3 - e;
    const double touch = (std::pow(2.0, p + 1) - 2.0) / (p * (p + 1));
    CHECK(pair_integral(sq, Panel{0.0, 1.0}, Panel{1.0, 2.0}, e, q) == doctest::Approx(touch).epsilon(1e-9));
    CHECK(pair_integral(sq, Panel{1.0, 2.0}, Panel{0.0, 1.0}, e, q) == doctest::Approx(touch).epsilon(1e-9));
    auto one = [](double, double) { return 1.0; };
    // int_0^1 int_2^3 (y-x)^{-2} = ln(4/3)
    CHECK(pair_integral(one, Panel{0.0, 1.0}, Panel{2.0, 3.0}, 2.0, q) ==
          doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-10));
    CHECK_THROWS_AS(pair_integral(one, Panel{0.0, 1.0}, Panel{0.5, 1.5}, 2.0, q), DomainError);
}

TEST_CASE("singular_pair_integral is symmetric under swapping panels") {
    auto f = [](double x, double y) { return (x - y) * (x - y) * std::exp(-x * x - y * y); };
    const Panel A{-0.3, 0.1}, B{0.1, 0.6};
    const double ab = singular_pair_integral(f, A, B, 1.5);
    const double ba = singular_pair_integral(f, B, A, 1.5);
    CHECK(std::abs(ab - ba) <= 1e-13 * std::abs(ab) + 1e-15);
}

TEST_CASE("principal value Laplacian of Getoor profiles and a Gaussian") {
    QuadratureConfig q;
    q.rel_tol = 1e-10;
    const double getoor[] = {oracle::kGetoor025, oracle::kGetoor050, oracle::kGetoor075};
    const double gauss0[] = {oracle::kGauss0_025, oracle::kGauss0_050, oracle::kGauss0_075};
    const double ss[] = {0.25, 0.5, 0.75};
    for (int i = 0; i < 3; ++i) {
        const FractionalKernel k(ss[i]);
        const SmoothFunction g = getoor_profile(0.0, 1.0, ss[i]);
        for (double x : {0.0, 0.3, -0.6})
            CHECK(principal_value_laplacian(g, k, x, q) == doctest::Approx(getoor[i]).epsilon(1e-6));
        CHECK(principal_value_laplacian(gaussian_bump(1.0, 0.0, 1.0), k, 0.0, q) ==
              doctest::Approx(gauss0[i]).epsilon(1e-8));
    }
}

TEST_CASE("element moments") {
    // J_k = int_0^h tau^k (d+tau)^{-e}
    const double d = 0.2, h = 0.1, e = 1.5;
    const auto J = element_moments(d, h, e);
    for (int k = 0; k < 3; ++k) {
        const double ref = oracle::composite([&](double t) { return std::pow(t, k) * std::pow(d + t, -e); }, 0.0, h, 8);
        CHECK(J[k] == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("exterior tail integral and rule") {
    const IntervalDomain dom(-1.0, 1.0);
    QuadratureConfig q;
    q.rel_tol = 1e-11;
    auto g = [&](double y) { return std::pow(dom.distance_to_boundary(y) + 1.0, -3.0); };
    CHECK(exterior_tail_integral(g, dom, q) == doctest::Approx(1.0).epsilon(1e-9));
    const ExteriorRule r = make_exterior_rule(1.0 / 64, 2.0, 0.0, 3.0);
    double acc = 0.0;
    for (size_t i = 0; i < r.size(); ++i) acc += r.weight[i] * std::pow(1.0 + r.dist[i], -3.0);
    CHECK(acc == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("quadrature config validation") {
    QuadratureConfig q;
    q.gauss_order = 0;
    CHECK_THROWS_AS(q.validate(), ValidationError);
    q = {};
    q.rel_tol = -1.0;
    CHECK_THROWS_AS(q.validate(), ValidationError);
}
