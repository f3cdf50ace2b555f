#pragma once

#include <Eigen/Core>
#include <vector>

#include "fraclap/assembly.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

enum class MassKind { lumped, consistent };

struct SpectralSemigroup {
    Flavor flavor = Flavor::dirichlet;
    MassKind mass_kind = MassKind::lumped;
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns, M-orthonormal, active DOFs
    Eigen::MatrixXd mass;          // mass used for orthonormality (diagonal when lumped)
    std::vector<int> dof_map;
    Mesh mesh;

    int dofs() const { return static_cast<int>(dof_map.size()); }
    bool complete() const { return eigenvalues.size() == dofs(); }
    // e^{-tA} applied to an active-DOF vector
    Eigen::VectorXd apply(const Eigen::VectorXd& f, double t) const;
};

// K u = M f with the consistent mass. Neumann requires int f = 0 and returns the
// mean-zero solution.
Field solve_elliptic(const FormMatrices& forms, const Field& f);

// Lowest `count` generalized eigenpairs (count < 0: all).
SpectralSemigroup eigendecompose(const FormMatrices& forms, int count = -1, MassKind mass = MassKind::lumped);

// sum_k e^{-lambda_k t} (psi_k^T M f) psi_k; inactive nodes are 0 in the result.
Field evolve(const SpectralSemigroup& sg, const Field& f, double t);

// max_{i,j} |sum_k e^{-lambda_k t} psi_k(i) psi_k(j)|
double heat_kernel_sup(const SpectralSemigroup& sg, double t);

// Solution of K u = M f through the eigenbasis (zero modes dropped).
Field spectral_solve(const SpectralSemigroup& sg, const Field& f);

}  // namespace fraclap
