#include "fraclap/assembly.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "fraclap/errors.hpp"
#include "fraclap/parallel.hpp"

namespace fraclap {

namespace {

using V16 = Eigen::Matrix<double, 16, 1>;

void require_match(const Mesh& mesh, const IntervalDomain& domain) {
    if (mesh.a != domain.a || mesh.b != domain.b) throw ValidationError("mesh must cover exactly the domain");
    if (mesh.N < 4) throw ValidationError("mesh needs N >= 4");
}

template <int M>
V16 outer16(const std::array<double, M>& g) {
    V16 v = V16::Zero();
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) v[4 * a + b] = g[a] * g[b];
    return v;
}

// Local matrix (4x4, row-major in a 16-vector) of the element pair (e, e+d).
V16 regional_local(int d, double h, const FractionalKernel& k, const QuadratureConfig& cfg) {
    const double e = k.exponent();
    const double C = k.c_ns;
    if (d == 0) {
        auto f = [h](double x, double y) -> V16 {
            const double t = (x - y) / h;
            return outer16<2>({-t, t});
        };
        return V16(0.5 * C * pair_integral(f, {0.0, h}, {0.0, h}, e, cfg));
    }
    if (d == 1) {
        // shared node merged so every component vanishes at the common corner
        auto f = [h](double x, double y) -> V16 {
            const double u = (h - x) / h, v = (y - h) / h;
            return outer16<3>({u, v - u, -v});
        };
        return V16(C * pair_integral(f, {0.0, h}, {h, 2.0 * h}, e, cfg));
    }
    const double off = d * h;
    auto f = [h, off](double x, double y) -> V16 {
        const double xi = x / h, eta = (y - off) / h;
        return outer16<4>({1.0 - xi, xi, -(1.0 - eta), -eta});
    };
    return V16(C * pair_integral(f, {0.0, h}, {off, off + h}, e, cfg));
}

// Power-law exponents of w measured near the interval and far away.
void probe_weight(const ExteriorWeight& w, double length, bool endpoint_dofs) {
    if (w.is_zero()) return;
    const double d1 = 1e-9 * length, d2 = 1e-7 * length;
    const double w1 = w.at_distance(d1), w2 = w.at_distance(d2);
    if (w1 < 0.0 || w2 < 0.0) throw ValidationError("exterior weight must be nonnegative");
    if (w1 > 0.0 && w2 > 0.0) {
        const double alpha = std::log(w1 / w2) / std::log(d1 / d2);
        if (endpoint_dofs && alpha <= -1.0 + 1e-3)
            throw DivergenceError("exterior integral diverges: weight ~ dist^" + std::to_string(alpha) +
                                  " at the boundary is not integrable against u_N^2 for endpoint DOFs");
        if (alpha < w.boundary_exponent() - 0.1)
            throw ValidationError("exterior weight is more singular at the boundary than declared");
    }
    const double f1 = 1e5 * length, f2 = 1e7 * length;
    const double t1 = w.at_distance(f1), t2 = w.at_distance(f2);
    if (t1 > 0.0 && t2 > 0.0) {
        const double gamma = -std::log(t2 / t1) / std::log(f2 / f1);
        if (gamma <= 1.0 + 1e-3)
            throw DivergenceError("exterior weight is not integrable at infinity (decay ~ dist^-" +
                                  std::to_string(gamma) + ")");
    }
}

Eigen::MatrixXd mirror_sum(const Eigen::MatrixXd& local) {
    // local indexing counts nodes from the boundary nearest y; the left side
    // uses it directly, the right side reversed.
    Eigen::MatrixXd out = local + local.reverse();
    return 0.5 * (out + out.transpose());
}

}  // namespace

Eigen::VectorXd FormMatrices::expand(const Eigen::VectorXd& active) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.nodes());
    for (int i = 0; i < size(); ++i) full[dof_map[i]] = active[i];
    return full;
}

Eigen::VectorXd FormMatrices::restrict_nodes(const Eigen::VectorXd& nodal) const {
    Eigen::VectorXd out(size());
    for (int i = 0; i < size(); ++i) out[i] = nodal[dof_map[i]];
    return out;
}

double FormMatrices::norm() const { return stiffness.cwiseAbs().maxCoeff(); }

Eigen::MatrixXd assemble_mass(const Mesh& mesh) {
    const int n = mesh.nodes();
    const double h = mesh.h();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < mesh.N; ++e) {
        M(e, e) += h / 3.0;
        M(e + 1, e + 1) += h / 3.0;
        M(e, e + 1) += h / 6.0;
        M(e + 1, e) += h / 6.0;
    }
    return M;
}

Eigen::MatrixXd assemble_regional(const Mesh& mesh, const FractionalKernel& kernel, const QuadratureConfig& quad) {
    quad.validate();
    const int N = mesh.N;
    const double h = mesh.h();
    std::vector<V16> local(N);
    parallel_for(N, [&](int d) { local[d] = regional_local(d, h, kernel, quad); });

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int d = 0; d < N; ++d) {
        const V16& L = local[d];
        const int m = d == 0 ? 2 : (d == 1 ? 3 : 4);
        for (int e = 0; e + d < N; ++e) {
            std::array<int, 4> dof{};
            if (d == 0)
                dof = {e, e + 1, 0, 0};
            else if (d == 1)
                dof = {e, e + 1, e + 2, 0};
            else
                dof = {e, e + 1, e + d, e + d + 1};
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) K(dof[a], dof[b]) += L[4 * a + b];
        }
    }
    return 0.5 * (K + K.transpose());
}

Eigen::MatrixXd assemble_kappa_mass(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain) {
    require_match(mesh, domain);
    const int N = mesh.N;
    const double h = mesh.h();
    const double pw = 2.0 * kernel.s;
    const double scale = kernel.c_ns / pw;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N + 1, N + 1);
    // contribution of dist^{-2s} to one endpoint, element j counted from it;
    // local node 0 is the node nearer that endpoint.
    auto add = [&](int j, int g_near, int g_far) {
        const auto J = element_moments(j * h, h, pw);
        const double j1 = J[1] / h, j2 = J[2] / (h * h);
        const bool near_active = g_near != 0 && g_near != N;
        const bool far_active = g_far != 0 && g_far != N;
        if (far_active) K(g_far, g_far) += scale * j2;
        if (j == 0) return;  // near node is the endpoint itself
        if (near_active) K(g_near, g_near) += scale * (J[0] - 2.0 * j1 + j2);
        if (near_active && far_active) {
            K(g_near, g_far) += scale * (j1 - j2);
            K(g_far, g_near) += scale * (j1 - j2);
        }
    };
    for (int e = 0; e < N; ++e) {
        add(e, e, e + 1);              // distance to a
        add(N - 1 - e, e + 1, e);      // distance to b
    }
    return K;
}

Eigen::MatrixXd assemble_exterior_neumann(const Mesh& mesh, const FractionalKernel& kernel,
                                          const IntervalDomain& domain) {
    require_match(mesh, domain);
    const int N = mesh.N;
    const double h = mesh.h();
    const double ex = kernel.exponent();
    const ExteriorRule rule = make_exterior_rule(h, domain.length(), 0.0, ex);
    const int Q = static_cast<int>(rule.size());
    const int chunk = 32;
    const int nchunks = (Q + chunk - 1) / chunk;

    Eigen::MatrixXd B(N + 1, Q);
    std::vector<Eigen::VectorXd> diag(nchunks), off(nchunks), row0(nchunks);
    parallel_for(nchunks, [&](int c) {
        Eigen::VectorXd dg = Eigen::VectorXd::Zero(N + 1), of = Eigen::VectorXd::Zero(N + 1),
                        r0 = Eigen::VectorXd::Zero(N + 1);
        ElementKernelIntegrals I;
        for (int q = c * chunk; q < std::min(Q, (c + 1) * chunk); ++q) {
            const double w = rule.weight[q];
            I.compute(rule.dist[q], h, N, ex);
            double rho_q = 0.0;
            for (int j = 0; j < N; ++j) rho_q += I.i0[j];
            // shifted moments
            Eigen::Ref<Eigen::VectorXd> mu = B.col(q);
            double tail = 0.0;
            for (int j = 1; j < N; ++j) tail += I.i0[j];
            mu[0] = -(I.far[0] + tail);
            for (int l = 1; l < N; ++l) mu[l] = I.far[l - 1] + I.near[l];
            mu[N] = I.far[N - 1];
            mu *= std::sqrt(w / rho_q);
            // element 0: shifted boundary function is -lambda_far there
            dg[0] += w * I.ff[0];
            dg[1] += w * I.ff[0];
            r0[1] -= w * I.ff[0];
            for (int j = 1; j < N; ++j) {
                dg[j] += w * I.nn[j];
                dg[j + 1] += w * I.ff[j];
                of[j] += w * I.nf[j];
                dg[0] += w * I.i0[j];
                r0[j] -= w * I.near[j];
                r0[j + 1] -= w * I.far[j];
            }
        }
        diag[c] = dg;
        off[c] = of;
        row0[c] = r0;
    });
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int c = 0; c < nchunks; ++c) {
        for (int l = 0; l <= N; ++l) X(l, l) += diag[c][l];
        for (int j = 1; j < N; ++j) {
            X(j, j + 1) += off[c][j];
            X(j + 1, j) += off[c][j];
        }
        for (int l = 1; l <= N; ++l) {
            X(0, l) += row0[c][l];
            X(l, 0) += row0[c][l];
        }
    }
    X.noalias() -= B * B.transpose();
    return kernel.c_ns * mirror_sum(X);
}

namespace {

// sum_sides int c(y) c(y)^T density(dist) dy, c = moment / rho (unshifted).
Eigen::MatrixXd exterior_moment_gram(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                                     const std::function<double(double)>& density, double alpha, double tail_decay,
                                     const std::vector<double>& breakpoints, DofSet dofs) {
    const int N = mesh.N;
    const double h = mesh.h();
    const double ex = kernel.exponent();
    if (dofs == DofSet::interior) alpha += 2.0 * std::min(2.0 * kernel.s, 1.0);
    alpha = std::min(alpha, 0.0);
    const ExteriorRule rule = make_exterior_rule(h, domain.length(), alpha, tail_decay, breakpoints);
    const int Q = static_cast<int>(rule.size());
    Eigen::MatrixXd B(N + 1, Q);
    parallel_for(Q, [&](int q) {
        ElementKernelIntegrals I;
        I.compute(rule.dist[q], h, N, ex);
        double rho_q = 0.0;
        for (int j = 0; j < N; ++j) rho_q += I.i0[j];
        Eigen::Ref<Eigen::VectorXd> c = B.col(q);
        c[0] = I.near[0];
        for (int l = 1; l < N; ++l) c[l] = I.far[l - 1] + I.near[l];
        c[N] = I.far[N - 1];
        const double wq = rule.weight[q] * density(rule.dist[q]);
        c *= std::sqrt(wq) / rho_q;
    });
    if (dofs == DofSet::interior) {
        B.row(0).setZero();
        B.row(N).setZero();
    }
    Eigen::MatrixXd X = B * B.transpose();
    return mirror_sum(X);
}

}  // namespace

Eigen::MatrixXd assemble_exterior_weighted(const Mesh& mesh, const FractionalKernel& kernel,
                                           const IntervalDomain& domain, const ExteriorWeight& w, DofSet dofs) {
    require_match(mesh, domain);
    if (w.is_zero()) return Eigen::MatrixXd::Zero(mesh.nodes(), mesh.nodes());
    probe_weight(w, domain.length(), dofs == DofSet::all);
    return exterior_moment_gram(mesh, kernel, domain, [&](double d) { return w.at_distance(d); },
                                w.boundary_exponent(), w.tail_decay(), w.breakpoints(), dofs);
}

namespace {

FormMatrices package(Flavor flavor, const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                     const Eigen::MatrixXd& K_full, DofSet dofs) {
    FormMatrices F;
    F.flavor = flavor;
    F.mesh = mesh;
    F.kernel = kernel;
    F.domain = domain;
    const int n = mesh.nodes();
    for (int i = 0; i < n; ++i)
        if (dofs == DofSet::all || (i != 0 && i != mesh.N)) F.dof_map.push_back(i);
    const int m = F.size();
    const Eigen::MatrixXd M = assemble_mass(mesh);
    F.stiffness.resize(m, m);
    F.mass.resize(m, m);
    F.lumped_mass.resize(m);
    for (int i = 0; i < m; ++i) {
        F.lumped_mass[i] = M.row(F.dof_map[i]).sum();
        for (int j = 0; j < m; ++j) {
            F.stiffness(i, j) = K_full(F.dof_map[i], F.dof_map[j]);
            F.mass(i, j) = M(F.dof_map[i], F.dof_map[j]);
        }
    }
    return F;
}

}  // namespace

FormMatrices assemble_dirichlet(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                                const QuadratureConfig& quad) {
    require_match(mesh, domain);
    Eigen::MatrixXd K = assemble_regional(mesh, kernel, quad) + assemble_kappa_mass(mesh, kernel, domain);
    return package(Flavor::dirichlet, mesh, kernel, domain, K, DofSet::interior);
}

FormMatrices assemble_neumann(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                              const QuadratureConfig& quad, bool check_psd) {
    require_match(mesh, domain);
    Eigen::MatrixXd K = assemble_regional(mesh, kernel, quad) + assemble_exterior_neumann(mesh, kernel, domain);
    FormMatrices F = package(Flavor::neumann, mesh, kernel, domain, K, DofSet::all);
    if (check_psd) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F.stiffness, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NonConvergence("Neumann PSD check: eigen solver failed");
        if (es.eigenvalues()[0] < -1e-8 * F.norm())
            throw NonConvergence("Neumann stiffness is not positive semidefinite (lambda_min = " +
                                 std::to_string(es.eigenvalues()[0]) + ")");
    }
    return F;
}

FormMatrices assemble_robin(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                            const ExteriorWeight& beta, const QuadratureConfig& quad) {
    require_match(mesh, domain);
    Eigen::MatrixXd K = assemble_regional(mesh, kernel, quad) + assemble_exterior_neumann(mesh, kernel, domain);
    if (!beta.is_zero()) {
        probe_weight(beta, domain.length(), true);
        // energy of u_R = r u_N beyond the Neumann part: C rho (1-r)^2 + beta r^2 per unit c c^T
        const double C = kernel.c_ns, s = kernel.s, L = domain.length();
        auto density = [&](double d) {
            const double b = beta.at_distance(d);
            if (b == 0.0) return 0.0;
            const double Cr = C * power_integral(d, d + L, -2.0 * s);
            const double r = Cr / (Cr + b);
            return Cr * (1.0 - r) * (1.0 - r) + b * r * r;
        };
        K += exterior_moment_gram(mesh, kernel, domain, density, std::min(0.0, beta.boundary_exponent()),
                                  std::max(beta.tail_decay(), 1.0 + 2.0 * s), beta.breakpoints(), DofSet::all);
    }
    FormMatrices F = package(Flavor::robin, mesh, kernel, domain, K, DofSet::all);
    F.weight_label = beta.label();
    return F;
}

FormMatrices assemble_mu(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                         const ExteriorWeight& w, const QuadratureConfig& quad, DofSet dofs) {
    require_match(mesh, domain);
    Eigen::MatrixXd K = assemble_regional(mesh, kernel, quad) + assemble_exterior_neumann(mesh, kernel, domain);
    K += assemble_exterior_weighted(mesh, kernel, domain, w, dofs);
    FormMatrices F = package(Flavor::mu, mesh, kernel, domain, K, dofs);
    F.weight_label = w.label();
    return F;
}

void export_matrix_binary(const Eigen::MatrixXd& m, const std::string& path) {
    if (m.rows() != m.cols()) throw ValidationError("binary export expects a square matrix");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    os.write("FLAP", 4);
    const std::uint32_t n = static_cast<std::uint32_t>(m.rows());
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            os.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
}

Eigen::MatrixXd import_matrix_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FLAP", 4) != 0) throw ValidationError(path + ": bad magic");
    std::uint32_t n = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    Eigen::MatrixXd m(n, n);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j) {
            double v;
            is.read(reinterpret_cast<char*>(&v), sizeof v);
            m(i, j) = v;
        }
    if (!is) throw ValidationError(path + ": truncated matrix");
    return m;
}

void export_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) os << ',';
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace fraclap
