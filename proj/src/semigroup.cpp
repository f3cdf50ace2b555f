#include "fraclap/semigroup.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "fraclap/errors.hpp"

namespace fraclap {

namespace {

void require_mesh(const Mesh& a, const Mesh& b) {
    if (a.a != b.a || a.b != b.b || a.N != b.N) throw ValidationError("field mesh does not match the form mesh");
}

Eigen::VectorXd restrict_to(const std::vector<int>& dofs, const Eigen::VectorXd& nodal) {
    Eigen::VectorXd out(dofs.size());
    for (size_t i = 0; i < dofs.size(); ++i) out[i] = nodal[dofs[i]];
    return out;
}

Field expand_to(const Mesh& mesh, const std::vector<int>& dofs, const Eigen::VectorXd& active) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.nodes());
    for (size_t i = 0; i < dofs.size(); ++i) full[dofs[i]] = active[i];
    return Field(mesh, full);
}

}  // namespace

Eigen::VectorXd SpectralSemigroup::apply(const Eigen::VectorXd& f, double t) const {
    if (t < 0.0) throw DomainError("evolve: t must be >= 0");
    Eigen::VectorXd coef = eigenvectors.transpose() * (mass * f);
    for (Eigen::Index k = 0; k < coef.size(); ++k) coef[k] *= std::exp(-eigenvalues[k] * t);
    return eigenvectors * coef;
}

Field solve_elliptic(const FormMatrices& forms, const Field& f) {
    require_mesh(forms.mesh, f.mesh);
    const Eigen::VectorXd fa = restrict_to(forms.dof_map, f.coeffs);
    const Eigen::VectorXd rhs = forms.mass * fa;
    const Eigen::MatrixXd& K = forms.stiffness;
    if (forms.flavor == Flavor::neumann) {
        const Eigen::VectorXd m1 = forms.mass * Eigen::VectorXd::Ones(forms.size());
        const double total = rhs.sum();
        const double scale = (forms.mass * fa.cwiseAbs()).sum();
        if (std::abs(total) > 1e-10 * scale + 1e-300) {
            std::ostringstream os;
            os << "Neumann problem requires int_Omega f dx = 0 (compatibility); got " << total;
            throw SingularSystemError(os.str());
        }
        const double gamma = forms.norm() / (m1.squaredNorm());
        Eigen::MatrixXd A = K + gamma * m1 * m1.transpose();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() != Eigen::Success) throw SingularSystemError("Neumann solve failed");
        Eigen::VectorXd u = ldlt.solve(rhs);
        return expand_to(forms.mesh, forms.dof_map, u);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw SingularSystemError("stiffness matrix is not positive definite (" + to_string(forms.flavor) + ")");
    return expand_to(forms.mesh, forms.dof_map, llt.solve(rhs));
}

SpectralSemigroup eigendecompose(const FormMatrices& forms, int count, MassKind mass) {
    const int n = forms.size();
    if (count < 0) count = n;
    if (count == 0 || count > n) throw ValidationError("eigendecompose: count must be in [1, DOF count]");
    SpectralSemigroup sg;
    sg.flavor = forms.flavor;
    sg.mass_kind = mass;
    sg.dof_map = forms.dof_map;
    sg.mesh = forms.mesh;
    Eigen::VectorXd lam;
    Eigen::MatrixXd vec;
    if (mass == MassKind::lumped) {
        const Eigen::VectorXd d = forms.lumped_mass;
        const Eigen::VectorXd dis = d.cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd S = dis.asDiagonal() * forms.stiffness * dis.asDiagonal();
        S = 0.5 * (S + S.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        if (es.info() != Eigen::Success) throw NonConvergence("symmetric eigen solver failed");
        lam = es.eigenvalues();
        vec = dis.asDiagonal() * es.eigenvectors();
        sg.mass = d.asDiagonal();
    } else {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(forms.stiffness, forms.mass);
        if (es.info() != Eigen::Success) throw NonConvergence("generalized eigen solver failed");
        lam = es.eigenvalues();
        vec = es.eigenvectors();
        sg.mass = forms.mass;
    }
    sg.eigenvalues = lam.head(count);
    sg.eigenvectors = vec.leftCols(count);
    for (int k = 0; k < count; ++k) {
        auto col = sg.eigenvectors.col(k);
        const double tol = 1e-12 * col.cwiseAbs().maxCoeff();
        for (int i = 0; i < n; ++i)
            if (std::abs(col[i]) > tol) {
                if (col[i] < 0.0) col *= -1.0;
                break;
            }
    }
    return sg;
}

Field evolve(const SpectralSemigroup& sg, const Field& f, double t) {
    require_mesh(sg.mesh, f.mesh);
    return expand_to(sg.mesh, sg.dof_map, sg.apply(restrict_to(sg.dof_map, f.coeffs), t));
}

double heat_kernel_sup(const SpectralSemigroup& sg, double t) {
    if (!(t > 0.0)) throw DomainError("heat_kernel_sup: t must be positive");
    if (!sg.complete()) throw ValidationError("heat_kernel_sup needs a full decomposition");
    // the kernel matrix is positive semidefinite, so its largest entry is on the diagonal
    Eigen::VectorXd e(sg.eigenvalues.size());
    for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = std::exp(-sg.eigenvalues[k] * t);
    const Eigen::VectorXd diag = sg.eigenvectors.cwiseAbs2() * e;
    return diag.maxCoeff();
}

Field spectral_solve(const SpectralSemigroup& sg, const Field& f) {
    require_mesh(sg.mesh, f.mesh);
    const Eigen::VectorXd fa = restrict_to(sg.dof_map, f.coeffs);
    Eigen::VectorXd coef = sg.eigenvectors.transpose() * (sg.mass * fa);
    const double cutoff = 1e-10 * std::abs(sg.eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < coef.size(); ++k)
        coef[k] = std::abs(sg.eigenvalues[k]) > cutoff ? coef[k] / sg.eigenvalues[k] : 0.0;
    return expand_to(sg.mesh, sg.dof_map, sg.eigenvectors * coef);
}

}  // namespace fraclap
