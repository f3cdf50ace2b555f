#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclap/errors.hpp"
#include "fraclap/extensions.hpp"
#include "oracles.hpp"

using namespace fraclap;

namespace {
Field linear(const Mesh& m) {
    return Field::interpolate(m, [](double x) { return x; });
}
}  // namespace

TEST_CASE("Neumann extension of u(x) = x at y = 2") {
    const IntervalDomain d(0.0, 1.0);
    const Mesh m(0.0, 1.0, 8);
    const double ref[] = {oracle::kUN2_025, oracle::kUN2_050, oracle::kUN2_075};
    const double ss[] = {0.25, 0.5, 0.75};
    for (int i = 0; i < 3; ++i) {
        const ExtendedField w = extend(linear(m), Flavor::neumann, FractionalKernel(ss[i]), d);
        CHECK(w(2.0) == doctest::Approx(ref[i]).epsilon(1e-12));
        // mirror point sees 1 - u
        CHECK(w(-1.0) == doctest::Approx(1.0 - ref[i]).epsilon(1e-12));
    }
    const ExtendedField w = extend(linear(m), Flavor::neumann, FractionalKernel(0.5), d);
    CHECK(w.moment(2.0) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("Dirichlet and Robin extensions") {
    const IntervalDomain d(0.0, 1.0);
    const Mesh m(0.0, 1.0, 8);
    const FractionalKernel k(0.5);
    CHECK(extend(linear(m), Flavor::dirichlet, k, d)(2.0) == 0.0);
    const double c = 0.7;
    const ExtendedField r = extend(linear(m), Flavor::robin, k, d, ExteriorWeight::constant_window(c, 0.0, 5.0));
    const double crho = oracle::kC050 * oracle::kRho2_050;
    CHECK(r(2.0) == doctest::Approx(crho / (crho + c) * oracle::kUN2_050).epsilon(1e-12));
    // beta = 0 reduces to Neumann
    const ExtendedField r0 = extend(linear(m), Flavor::robin, k, d, ExteriorWeight::zero());
    CHECK(r0(2.0) == doctest::Approx(oracle::kUN2_050).epsilon(1e-12));
    // outside the window
    CHECK(r(7.0) == doctest::Approx(extend(linear(m), Flavor::neumann, k, d)(7.0)).epsilon(1e-12));
    CHECK_THROWS_AS(extend(linear(m), Flavor::mu, k, d), DomainError);
    CHECK_THROWS_AS(r.exterior(0.5), DomainError);
}

TEST_CASE("normal derivative of explicit functions") {
    const IntervalDomain d(0.0, 1.0);
    const FractionalKernel k(0.5);
    QuadratureConfig q;
    q.rel_tol = 1e-11;
    CHECK(std::abs(nonlocal_normal_derivative([](double) { return 3.0; }, k, d, 1.5, q)) < 1e-14);
    // C int_0^1 (2 - x)^{-1} dx = ln 2 / pi
    CHECK(nonlocal_normal_derivative([](double x) { return x; }, k, d, 2.0, q) ==
          doctest::Approx(oracle::kC050 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("extensions satisfy their exterior conditions") {
    const IntervalDomain d(-1.0, 1.0);
    const Mesh m(d, 64);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0), e(-4.0, 0.5);
    Eigen::VectorXd c(m.nodes());
    for (int i = 0; i < m.nodes(); ++i) c[i] = u(rng);
    const Field f(m, c);
    const ExteriorWeight beta = ExteriorWeight::constant_window(1.0, 0.0, 1.0);
    for (double s : {0.25, 0.75}) {
        const FractionalKernel k(s);
        const ExtendedField wn = extend(f, Flavor::neumann, k, d);
        const ExtendedField wr = extend(f, Flavor::robin, k, d, beta);
        for (int i = 0; i < 6; ++i) {
            const double dist = std::pow(10.0, e(rng));
            const double x = i % 2 ? d.b + dist : d.a - dist;
            const double scale = k.c_ns * oracle::rho(d.a, d.b, s, x) * c.cwiseAbs().maxCoeff();
            CHECK(std::abs(nonlocal_normal_derivative(wn, k, d, x)) <= 1e-8 * scale);
            CHECK(std::abs(nonlocal_normal_derivative(wr, k, d, x) + beta(d, x) * wr(x)) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("exterior weights") {
    const IntervalDomain d(-1.0, 1.0);
    const ExteriorWeight w = ExteriorWeight::constant_window(2.0, 0.5, 1.0);
    CHECK(w(d, 1.7) == 2.0);
    CHECK(w(d, -1.2) == 0.0);
    CHECK(w.scaled(0.5)(d, -1.7) == 1.0);
    CHECK(ExteriorWeight::algebraic_decay(3.0, 2.0).at_distance(1.0) == doctest::Approx(0.75));
    const ExteriorWeight t = ExteriorWeight::tabulated({0.0, 1.0, 2.0}, {1.0, 3.0, 1.0});
    CHECK(t.at_distance(0.5) == doctest::Approx(2.0));
    CHECK(t.at_distance(3.0) == 0.0);
    CHECK_THROWS_AS(ExteriorWeight::constant_window(-1.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(ExteriorWeight::algebraic_decay(1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(ExteriorWeight::tabulated({0.0, 0.0}, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(w(d, 0.0), DomainError);
}

TEST_CASE("Robin-equivalent density") {
    const IntervalDomain d(0.0, 1.0);
    const FractionalKernel k(0.5);
    const ExteriorWeight beta = ExteriorWeight::constant_window(0.7, 0.0, 5.0);
    const double crho = oracle::kC050 * oracle::kRho2_050;
    CHECK(robin_equivalent_density(beta, k, d)(d, 2.0) == doctest::Approx(crho * 0.7 / (crho + 0.7)));
    CHECK(rho_density(2.0, k, d)(d, 2.0) == doctest::Approx(2.0 * crho));
}

TEST_CASE("flavor names") {
    for (Flavor f : {Flavor::dirichlet, Flavor::neumann, Flavor::robin, Flavor::mu})
        CHECK(flavor_from_string(to_string(f)) == f);
    CHECK_THROWS_AS(flavor_from_string("periodic"), ValidationError);
}
