#include <doctest.h>

#include <cmath>

#include "fraclap/errors.hpp"
#include "fraclap/semigroup.hpp"

using namespace fraclap;

namespace {
const IntervalDomain kDom(-1.0, 1.0);
const Mesh kMesh(kDom, 64);
const FractionalKernel kKer(0.5);
}  // namespace

TEST_CASE("eigenvectors are mass-orthonormal and ascending") {
    const FormMatrices D = assemble_dirichlet(kMesh, kKer, kDom);
    for (MassKind mk : {MassKind::lumped, MassKind::consistent}) {
        const SpectralSemigroup sg = eigendecompose(D, -1, mk);
        REQUIRE(sg.complete());
        const Eigen::MatrixXd G = sg.eigenvectors.transpose() * sg.mass * sg.eigenvectors;
        CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-10);
        for (int i = 1; i < sg.eigenvalues.size(); ++i) CHECK(sg.eigenvalues[i] >= sg.eigenvalues[i - 1]);
    }
    const SpectralSemigroup part = eigendecompose(D, 5);
    CHECK(part.eigenvalues.size() == 5);
    CHECK_FALSE(part.complete());
    CHECK_THROWS_AS(heat_kernel_sup(part, 0.1), ValidationError);
    CHECK_THROWS_AS(eigendecompose(D, 0), ValidationError);
}

TEST_CASE("Neumann semigroup conserves constants") {
    const FormMatrices N = assemble_neumann(kMesh, kKer, kDom);
    const SpectralSemigroup sg = eigendecompose(N);
    CHECK(std::abs(sg.eigenvalues[0]) <= 1e-8 * N.norm());
    const Field one = Field::interpolate(kMesh, [](double) { return 1.0; });
    for (double t : {0.01, 1.0, 10.0})
        CHECK((evolve(sg, one, t).coeffs.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("evolve at t = 0 and positivity") {
    const FormMatrices R =
        assemble_robin(kMesh, kKer, kDom, ExteriorWeight::constant_window(1.0, 0.0, 1.0));
    const SpectralSemigroup sg = eigendecompose(R);
    const Field f = Field::interpolate(kMesh, [](double x) { return x > 0.2 && x < 0.4 ? 1.0 : 0.0; });
    CHECK((evolve(sg, f, 0.0).coeffs - f.coeffs).cwiseAbs().maxCoeff() < 1e-10);
    const Field u = evolve(sg, f, 0.05);
    CHECK(u.coeffs.minCoeff() >= -1e-10);
    CHECK(u.coeffs.maxCoeff() <= 1.0 + 1e-10);
    CHECK_THROWS_AS(evolve(sg, f, -1.0), DomainError);
    CHECK(heat_kernel_sup(sg, 0.01) > heat_kernel_sup(sg, 0.1));
}

TEST_CASE("elliptic solves") {
    const FormMatrices D = assemble_dirichlet(kMesh, kKer, kDom);
    const Field f = Field::interpolate(kMesh, [](double x) { return std::cos(x); });
    const Field u = solve_elliptic(D, f);
    CHECK(u.coeffs[0] == 0.0);
    CHECK(u.coeffs[kMesh.N] == 0.0);
    const Field v = spectral_solve(eigendecompose(D, -1, MassKind::consistent), f);
    CHECK((u.coeffs - v.coeffs).cwiseAbs().maxCoeff() <= 1e-9 * u.coeffs.cwiseAbs().maxCoeff());

    const FormMatrices N = assemble_neumann(kMesh, kKer, kDom);
    CHECK_THROWS_AS(solve_elliptic(N, f), SingularSystemError);
    const Field g = Field::interpolate(kMesh, [](double x) { return std::sin(3 * x); });
    const Field w = solve_elliptic(N, g);
    CHECK(std::abs((assemble_mass(kMesh) * w.coeffs).sum()) < 1e-12);  // mean zero
    CHECK_THROWS_AS(solve_elliptic(D, Field::interpolate(Mesh(kDom, 32), [](double) { return 1.0; })),
                    ValidationError);
}

TEST_CASE("Getoor profile at s = 0.5") {
    const Mesh m(kDom, 256);
    const FormMatrices D = assemble_dirichlet(m, kKer, kDom);
    const Field u = solve_elliptic(D, Field::interpolate(m, [](double) { return 1.0; }));
    double err = 0.0;
    for (int i = 0; i < m.nodes(); ++i) {
        const double x = m.node(i);
        err = std::max(err, std::abs(u.coeffs[i] - std::sqrt(std::max(0.0, 1 - x * x))));
    }
    CHECK(err < 2e-2);
}
