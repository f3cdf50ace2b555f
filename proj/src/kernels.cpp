#include "fraclap/kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fraclap/errors.hpp"

namespace fraclap {

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void require_s(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        std::ostringstream os;
        os << "fractional order s must lie in (0,1), got " << s;
        throw DomainError(os.str());
    }
}

}  // namespace

double gamma_fn(double x) {
    if (x < 0.5) {
        const double sp = std::sin(std::numbers::pi * x);
        if (sp == 0.0) throw DomainError("gamma_fn: pole");
        return std::numbers::pi / (sp * gamma_fn(1.0 - x));
    }
    x -= 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (x + i);
    const double t = x + 7.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * acc;
}

double normalization_constant(int n, double s) {
    require_s(s);
    if (n < 1) throw DomainError("dimension n must be >= 1");
    return s * std::pow(2.0, 2.0 * s) * gamma_fn((2.0 * s + n) / 2.0) /
           (std::pow(std::numbers::pi, n / 2.0) * gamma_fn(1.0 - s));
}

double power_integral(double lo, double hi, double p) {
    if (lo == 0.0) return std::pow(hi, p) / p;
    const double L = std::log1p((hi - lo) / lo);
    const double x = p * L;
    const double f = (x == 0.0) ? 1.0 : std::expm1(x) / x;
    return std::pow(lo, p) * L * f;
}

IntervalDomain::IntervalDomain(double a_, double b_, double r)
    : a(a_), b(b_), exterior_truncation(r) {
    if (!(a < b)) throw DomainError("interval requires a < b");
    if (!(r > 0.0)) throw DomainError("exterior_truncation must be positive");
}

double IntervalDomain::distance_to_boundary(double x) const {
    if (x <= a) return a - x;
    if (x >= b) return x - b;
    return std::min(x - a, b - x);
}

FractionalKernel::FractionalKernel(double s_) : s(s_), n(1) {
    require_s(s);
    c_ns = normalization_constant(n, s);
}

double FractionalKernel::operator()(double x, double y) const {
    return std::pow(std::abs(x - y), -exponent());
}

double rho(const IntervalDomain& d, const FractionalKernel& k, double x) {
    if (x >= d.a && x <= d.b) throw DomainError("rho: point must lie outside [a,b]");
    const double near = d.distance_to_boundary(x);
    return power_integral(near, near + d.length(), -2.0 * k.s);
}

double kappa(const IntervalDomain& d, const FractionalKernel& k, double x) {
    if (!d.contains(x)) throw DomainError("kappa: point must lie in (a,b)");
    const double two_s = 2.0 * k.s;
    return k.c_ns * (std::pow(d.b - x, -two_s) + std::pow(x - d.a, -two_s)) / two_s;
}

}  // namespace fraclap
