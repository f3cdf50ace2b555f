#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "fraclap/assembly.hpp"
#include "fraclap/errors.hpp"
#include "oracles.hpp"

using namespace fraclap;

TEST_CASE("P1 mass matrix") {
    const Mesh m(0.0, 1.0, 4);
    const Eigen::MatrixXd M = assemble_mass(m);
    const double h = m.h();
    CHECK(M(0, 0) == doctest::Approx(h / 3));
    CHECK(M(2, 2) == doctest::Approx(2 * h / 3));
    CHECK(M(1, 2) == doctest::Approx(h / 6));
    CHECK(M(0, 2) == 0.0);
    CHECK(M.sum() == doctest::Approx(1.0));
}

TEST_CASE("Dirichlet stiffness is the full-line Toeplitz matrix") {
    const IntervalDomain d(-1.0, 1.0);
    const Mesh m(d, 64);
    for (double s : {0.25, 0.5, 0.75}) {
        const FormMatrices f = assemble_dirichlet(m, FractionalKernel(s), d);
        REQUIRE(f.size() == m.N - 1);
        const double* t = oracle::hat_entries(s);
        const double scale = std::pow(m.h(), 1.0 - 2.0 * s);
        double worst = 0.0;
        for (int i = 0; i < f.size(); ++i)
            for (int k = 0; k < 4 && i + k < f.size(); ++k)
                worst = std::max(worst, std::abs(f.stiffness(i, i + k) - scale * t[k]) / (scale * t[0]));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("form structure") {
    const IntervalDomain d(-1.0, 1.0);
    const Mesh m(d, 48);
    const FractionalKernel k(0.5);
    const ExteriorWeight beta = ExteriorWeight::constant_window(1.0, 0.0, 1.0);
    const FormMatrices D = assemble_dirichlet(m, k, d);
    const FormMatrices N = assemble_neumann(m, k, d);
    const FormMatrices R = assemble_robin(m, k, d, beta);
    CHECK(N.size() == m.nodes());
    CHECK(R.size() == m.nodes());
    for (const FormMatrices* f : {&D, &N, &R}) {
        CHECK((f->stiffness - f->stiffness.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * f->norm());
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(f->stiffness).eigenvalues().minCoeff() >=
              -1e-10 * f->norm());
    }
    CHECK((N.stiffness * Eigen::VectorXd::Ones(N.size())).cwiseAbs().maxCoeff() <= 1e-10 * N.norm());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D.stiffness).eigenvalues().minCoeff() > 0.0);

    // ordering on interior-supported vectors
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(m.nodes());
        for (int i = 1; i < m.N; ++i) x[i] = g(rng);
        const double en = x.dot(N.stiffness * x), er = x.dot(R.stiffness * x);
        const Eigen::VectorXd xi = D.restrict_nodes(x);
        const double ed = xi.dot(D.stiffness * xi);
        CHECK(en <= er + 1e-10 * ed);
        CHECK(er <= ed + 1e-10 * ed);
    }
}

TEST_CASE("mu form") {
    const IntervalDomain d(-1.0, 1.0);
    const Mesh m(d, 32);
    const FractionalKernel k(0.25);
    const ExteriorWeight beta = ExteriorWeight::algebraic_decay(2.0, 3.0);
    const FormMatrices R = assemble_robin(m, k, d, beta);
    const FormMatrices mu = assemble_mu(m, k, d, robin_equivalent_density(beta, k, d));
    CHECK((mu.stiffness - R.stiffness).cwiseAbs().maxCoeff() <= 1e-10 * R.norm());
    const FormMatrices mu0 = assemble_mu(m, k, d, ExteriorWeight::zero());
    const FormMatrices N = assemble_neumann(m, k, d);
    CHECK((mu0.stiffness - N.stiffness).cwiseAbs().maxCoeff() <= 1e-12 * N.norm());
    const FormMatrices mui = assemble_mu(m, k, d, ExteriorWeight::zero(), {}, DofSet::interior);
    CHECK(mui.size() == m.N - 1);
}

TEST_CASE("expand and restrict") {
    const IntervalDomain d(0.0, 1.0);
    const FormMatrices D = assemble_dirichlet(Mesh(d, 8), FractionalKernel(0.5), d);
    const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(7, 1.0, 7.0);
    const Eigen::VectorXd n = D.expand(a);
    CHECK(n.size() == 9);
    CHECK(n[0] == 0.0);
    CHECK(n[8] == 0.0);
    CHECK(D.restrict_nodes(n) == a);
}

TEST_CASE("binary matrix round trip") {
    Eigen::MatrixXd A(3, 3);
    A << 1, 2, 3, 4, 5, 6, 7, 8, 1e-300;
    const auto path = std::filesystem::temp_directory_path() / "fraclap_matrix_test.bin";
    export_matrix_binary(A, path.string());
    CHECK(import_matrix_binary(path.string()) == A);
    std::filesystem::remove(path);
    CHECK_THROWS(import_matrix_binary((std::filesystem::temp_directory_path() / "fraclap_missing.bin").string()));
}

TEST_CASE("non-integrable exterior weights are rejected") {
    const IntervalDomain d(-1.0, 1.0);
    const Mesh m(d, 16);
    const FractionalKernel k(0.5);
    const double inf = std::numeric_limits<double>::infinity();
    const ExteriorWeight near = ExteriorWeight::custom([](double e) { return std::pow(e, -1.5); }, -1.5, inf, {}, "near");
    CHECK_THROWS_AS(assemble_mu(m, k, d, near), DivergenceError);
    const ExteriorWeight far = ExteriorWeight::custom([](double) { return 1.0; }, 0.0, 0.0, {}, "flat");
    CHECK_THROWS_AS(assemble_mu(m, k, d, far), DivergenceError);
}
