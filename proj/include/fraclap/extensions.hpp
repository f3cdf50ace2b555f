#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fraclap/kernels.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

enum class Flavor { dirichlet, neumann, robin, mu };

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);

// Nonnegative density on R \ [a,b]. Every kind is a function of the distance
// to the interval, identical on both sides.
class ExteriorWeight {
public:
    enum class Kind { zero, constant_window, algebraic_decay, tabulated, custom };

    static ExteriorWeight zero();
    // c on dist in [d_min, d_max], 0 elsewhere
    static ExteriorWeight constant_window(double c, double d_min, double d_max);
    // c (1 + dist)^{-p}, p > 1
    static ExteriorWeight algebraic_decay(double c, double p);
    // piecewise linear in dist through the samples, constant below the first, 0 past the last
    static ExteriorWeight tabulated(std::vector<double> dist, std::vector<double> values);
    // boundary_exponent: w ~ dist^alpha near the interval; tail_decay: w ~ dist^{-gamma} far away
    static ExteriorWeight custom(std::function<double(double)> of_distance, double boundary_exponent,
                                 double tail_decay, std::vector<double> breakpoints,
                                 std::string label);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    double at_distance(double d) const;
    double operator()(const IntervalDomain& domain, double y) const;
    ExteriorWeight scaled(double lambda) const;

    double boundary_exponent() const { return boundary_exponent_; }
    double tail_decay() const { return tail_decay_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::string& label() const { return label_; }

private:
    Kind kind_ = Kind::zero;
    std::function<double(double)> fn_;
    double boundary_exponent_ = 0.0;
    double tail_decay_ = std::numeric_limits<double>::infinity();
    std::vector<double> breakpoints_;
    std::string label_ = "zero";
};

// C beta rho / (C rho + beta): the density whose mu-form equals the Robin form.
ExteriorWeight robin_equivalent_density(const ExteriorWeight& beta, const FractionalKernel& kernel,
                                        const IntervalDomain& domain);
// factor * C * rho
ExteriorWeight rho_density(double factor, const FractionalKernel& kernel, const IntervalDomain& domain);

// Kernel integrals of P1 shape functions over each element, seen from an
// exterior point at distance eps. Element j is the j-th element counted from the
// boundary nearest the point; "near" is its node closer to that boundary.
struct ElementKernelIntegrals {
    std::vector<double> i0, near, far, nn, nf, ff;
    void compute(double eps, double h, int N, double exponent);
};

class ExtendedField {
public:
    ExtendedField(Field interior, Flavor flavor, FractionalKernel kernel, IntervalDomain domain,
                  ExteriorWeight beta = ExteriorWeight::zero());

    const Field& interior() const { return interior_; }
    Flavor flavor() const { return flavor_; }
    const ExteriorWeight& beta() const { return beta_; }

    // Interpolant on [a,b], extension outside.
    double operator()(double x) const;
    double exterior(double x) const;
    // int_Omega u(y) |x-y|^{-1-2s} dy
    double moment(double x) const;
    // int_Omega (u(y) - u(e)) |x-y|^{-1-2s} dy with e the endpoint nearest x
    double shifted_moment(double x) const;

private:
    double checked_distance(double x) const;

    Field interior_;
    Flavor flavor_;
    FractionalKernel kernel_;
    IntervalDomain domain_;
    ExteriorWeight beta_;
};

ExtendedField extend(const Field& u, Flavor flavor, const FractionalKernel& kernel,
                     const IntervalDomain& domain, const ExteriorWeight& beta = ExteriorWeight::zero());

// C int_Omega (v(x) - v(y)) |x-y|^{-1-2s} dy, evaluated by adaptive quadrature of
// the defining integral (independent of the moment formulas used by extend).
double nonlocal_normal_derivative(const ExtendedField& v, const FractionalKernel& kernel,
                                  const IntervalDomain& domain, double x,
                                  const QuadratureConfig& cfg = {});

// Same for a function given on all of R.
double nonlocal_normal_derivative(const std::function<double(double)>& v, const FractionalKernel& kernel,
                                  const IntervalDomain& domain, double x,
                                  const QuadratureConfig& cfg = {});

}  // namespace fraclap
