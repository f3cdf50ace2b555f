#pragma once

#include <Eigen/Core>

#include "fraclap/kernels.hpp"

namespace fraclap {

// Uniform partition of [a,b] into N elements, P1 nodal basis on N+1 nodes.
struct Mesh {
    double a = 0.0;
    double b = 1.0;
    int N = 4;

    Mesh() = default;
    Mesh(double a, double b, int N);
    explicit Mesh(const IntervalDomain& d, int N) : Mesh(d.a, d.b, N) {}

    double h() const { return (b - a) / N; }
    int nodes() const { return N + 1; }
    double node(int i) const { return i == N ? b : a + i * h(); }
    Eigen::VectorXd coordinates() const;
};

struct Field {
    Mesh mesh;
    Eigen::VectorXd coeffs;

    Field() = default;
    Field(const Mesh& m, Eigen::VectorXd c);

    // Piecewise-linear interpolant on [a,b].
    double operator()(double x) const;
    template <class F>
    static Field interpolate(const Mesh& m, F&& f) {
        Eigen::VectorXd c(m.nodes());
        for (int i = 0; i < m.nodes(); ++i) c[i] = f(m.node(i));
        return Field(m, std::move(c));
    }
};

}  // namespace fraclap
