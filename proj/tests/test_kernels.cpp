#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/errors.hpp"
#include "fraclap/kernels.hpp"
#include "oracles.hpp"

using namespace fraclap;

TEST_CASE("gamma_fn agrees with tgamma") {
    for (double x : {0.3, 0.5, 0.75, 1.0, 1.25, 2.5, 3.7, 7.1})
        CHECK(gamma_fn(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
}

TEST_CASE("normalization constant") {
    CHECK(std::abs(normalization_constant(1, 0.5) - 1.0 / std::numbers::pi) < 1e-14);
    CHECK(normalization_constant(1, 0.25) == doctest::Approx(oracle::kC025).epsilon(1e-13));
    CHECK(normalization_constant(1, 0.75) == doctest::Approx(oracle::kC075).epsilon(1e-13));
    CHECK(FractionalKernel(0.75).c_ns == doctest::Approx(oracle::kC075).epsilon(1e-13));
}

TEST_CASE("s outside (0,1) is rejected") {
    CHECK_THROWS_AS(FractionalKernel(0.0), DomainError);
    CHECK_THROWS_AS(FractionalKernel(1.0), DomainError);
    CHECK_THROWS_AS(normalization_constant(1, -0.2), DomainError);
    CHECK_THROWS_AS(normalization_constant(0, 0.5), DomainError);
}

TEST_CASE("power_integral") {
    CHECK(power_integral(1.0, 2.0, -1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(power_integral(1.0, 2.0, 1e-14) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // hi - lo tiny relative to lo
    CHECK(power_integral(1.0, 1.0 + 1e-12, -0.5) == doctest::Approx(1e-12).epsilon(1e-9));
    CHECK(power_integral(0.0, 4.0, 0.5) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("rho against the log-variable oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> e(-6.0, 1.0);
    const IntervalDomain d(-1.0, 1.0);
    for (double s : {0.25, 0.5, 0.75}) {
        const FractionalKernel k(s);
        for (int i = 0; i < 30; ++i) {
            const double dist = std::pow(10.0, e(rng));
            const double x = (i % 2 ? d.b + dist : d.a - dist);
            CHECK(rho(d, k, x) == doctest::Approx(oracle::rho(d.a, d.b, s, x)).epsilon(1e-10));
        }
    }
    CHECK(rho(IntervalDomain(0.0, 1.0), FractionalKernel(0.5), 2.0) == doctest::Approx(oracle::kRho2_050));
}

TEST_CASE("kappa against the oracle and the two-sided bound") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const IntervalDomain d(0.0, 2.0);
    for (double s : {0.25, 0.5, 0.75}) {
        const FractionalKernel k(s);
        for (int i = 0; i < 30; ++i) {
            const double x = d.a + d.length() * (1e-5 + (1 - 2e-5) * u(rng));
            const double kv = kappa(d, k, x);
            CHECK(kv == doctest::Approx(oracle::kappa(d.a, d.b, s, x)).epsilon(1e-10));
            const double scaled = kv * std::pow(d.distance_to_boundary(x), 2.0 * s);
            CHECK(scaled >= k.c_ns / (2.0 * s) * (1 - 1e-14));
            CHECK(scaled <= k.c_ns / s * (1 + 1e-14));
        }
    }
}

TEST_CASE("rho rejects interior points, kappa exterior ones") {
    const IntervalDomain d(-1.0, 1.0);
    const FractionalKernel k(0.5);
    CHECK_THROWS_AS(rho(d, k, 0.0), DomainError);
    CHECK_THROWS_AS(kappa(d, k, 1.5), DomainError);
    CHECK_THROWS_AS(IntervalDomain(1.0, 1.0), DomainError);
}

TEST_CASE("kernel value") {
    const FractionalKernel k(0.25);
    CHECK(k(0.0, 2.0) == doctest::Approx(std::pow(2.0, -1.5)));  // C not included
    CHECK(k(0.3, 0.1) == k(0.1, 0.3));
}
