#include "fraclap/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "fraclap/errors.hpp"

namespace fraclap {

Mesh::Mesh(double a_, double b_, int n) : a(a_), b(b_), N(n) {
    if (!(a < b)) throw DomainError("mesh requires a < b");
    if (N < 1) throw DomainError("mesh requires N >= 1");
}

Eigen::VectorXd Mesh::coordinates() const {
    Eigen::VectorXd x(nodes());
    for (int i = 0; i < nodes(); ++i) x[i] = node(i);
    return x;
}

Field::Field(const Mesh& m, Eigen::VectorXd c) : mesh(m), coeffs(std::move(c)) {
    if (coeffs.size() != m.nodes()) throw DomainError("field: coefficient count must equal N+1");
}

double Field::operator()(double x) const {
    if (x < mesh.a || x > mesh.b) throw DomainError("field evaluation outside [a,b]");
    const double t = (x - mesh.a) / mesh.h();
    const int e = std::clamp(static_cast<int>(std::floor(t)), 0, mesh.N - 1);
    const double xi = t - e;
    return (1.0 - xi) * coeffs[e] + xi * coeffs[e + 1];
}

}  // namespace fraclap
