#pragma once

namespace fraclap {

double gamma_fn(double x);

// s * 2^{2s} * Gamma((2s+n)/2) / (pi^{n/2} Gamma(1-s))
double normalization_constant(int n, double s);

// int_lo^hi t^{p-1} dt, stable for p -> 0 and hi - lo << lo. lo == 0 needs p > 0.
double power_integral(double lo, double hi, double p);

struct IntervalDomain {
    double a = 0.0;
    double b = 1.0;
    double exterior_truncation = 1.0;

    IntervalDomain() = default;
    IntervalDomain(double a, double b, double exterior_truncation = 1.0);

    double length() const { return b - a; }
    bool contains(double x) const { return x > a && x < b; }
    // dist(x, boundary) for interior points, dist(x, [a,b]) outside.
    double distance_to_boundary(double x) const;
};

struct FractionalKernel {
    double s = 0.5;
    int n = 1;
    double c_ns = 0.0;

    FractionalKernel() : FractionalKernel(0.5) {}
    explicit FractionalKernel(double s);

    double exponent() const { return n + 2.0 * s; }
    double operator()(double x, double y) const;
};

double rho(const IntervalDomain& domain, const FractionalKernel& kernel, double x);
double kappa(const IntervalDomain& domain, const FractionalKernel& kernel, double x);

}  // namespace fraclap
