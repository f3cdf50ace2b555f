#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fraclap/extensions.hpp"
#include "fraclap/kernels.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

enum class DofSet { all, interior };

struct FormMatrices {
    Flavor flavor = Flavor::dirichlet;
    Eigen::MatrixXd stiffness;     // active DOFs
    Eigen::MatrixXd mass;          // consistent P1 mass on active DOFs
    Eigen::VectorXd lumped_mass;   // row sums of the full consistent mass, active DOFs
    std::vector<int> dof_map;      // active DOF -> mesh node
    Mesh mesh;
    FractionalKernel kernel;
    IntervalDomain domain;
    std::string weight_label = "none";

    int size() const { return static_cast<int>(dof_map.size()); }
    // Active vector -> nodal vector (inactive nodes 0).
    Eigen::VectorXd expand(const Eigen::VectorXd& active) const;
    Eigen::VectorXd restrict_nodes(const Eigen::VectorXd& nodal) const;
    double norm() const;  // max-abs entry of the stiffness
};

Eigen::MatrixXd assemble_mass(const Mesh& mesh);

// (C/2) int int_{Omega x Omega} (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-2s}, all nodes.
Eigen::MatrixXd assemble_regional(const Mesh& mesh, const FractionalKernel& kernel, const QuadratureConfig& quad);

// int phi_i phi_j kappa on interior nodes (endpoint rows/cols left 0).
Eigen::MatrixXd assemble_kappa_mass(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain);

// C sum_sides int (T(y) - mu(y) mu(y)^T / rho(y)) dy with shape functions shifted
// by their value at the endpoint nearest y; all nodes. K_N = regional + this.
Eigen::MatrixXd assemble_exterior_neumann(const Mesh& mesh, const FractionalKernel& kernel,
                                          const IntervalDomain& domain);

// int u_N-moments: sum_sides int c(y) c(y)^T w(y) dy with c = moment / rho; all nodes.
Eigen::MatrixXd assemble_exterior_weighted(const Mesh& mesh, const FractionalKernel& kernel,
                                           const IntervalDomain& domain, const ExteriorWeight& w,
                                           DofSet dofs = DofSet::all);

FormMatrices assemble_dirichlet(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                                const QuadratureConfig& quad = {});
FormMatrices assemble_neumann(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                              const QuadratureConfig& quad = {}, bool check_psd = true);
FormMatrices assemble_robin(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                            const ExteriorWeight& beta, const QuadratureConfig& quad = {});
FormMatrices assemble_mu(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                         const ExteriorWeight& w, const QuadratureConfig& quad = {}, DofSet dofs = DofSet::all);

// Square dense matrix, little-endian: "FLAP", u32 size n, n*n f64 entries row-major.
void export_matrix_binary(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd import_matrix_binary(const std::string& path);
void export_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace fraclap
