#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/kernels.hpp"

namespace fraclap {

enum class TailSubstitution { algebraic };

struct QuadratureConfig {
    int gauss_order = 16;
    double pv_inner_radius = 0.5;
    TailSubstitution tail_substitution = TailSubstitution::algebraic;
    double rel_tol = 1e-8;
    int max_depth = 30;

    void validate() const;
};

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Cached Gauss-Legendre rule, 1 <= n <= 64.
const GaussRule& gauss_legendre(int n);

constexpr double kGradingRatio = 0.15;

struct Panel {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Smooth function on the real line with derivative access. `breakpoints` lists
// points where the function is only piecewise smooth. Most of the variation lies
// within a few `scale` of `center`.
struct SmoothFunction {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    double scale = 1.0;
    double center = 0.0;
    std::vector<double> breakpoints;

    double operator()(double x) const { return value(x); }
};

SmoothFunction gaussian_bump(double amplitude, double center, double width);
SmoothFunction constant_function(double c);
// a (1 - ((x-c)/r)^2)^4 on |x-c| < r, zero elsewhere (C^3)
SmoothFunction compact_bump(double amplitude, double center, double radius);
// (r^2 - (x-c)^2)_+^s
SmoothFunction getoor_profile(double center, double radius, double s);

namespace detail {

template <class V>
V vzero() {
    if constexpr (std::is_arithmetic_v<V>)
        return V(0);
    else
        return V::Zero();
}

template <class V>
double vmag(const V& v) {
    if constexpr (std::is_arithmetic_v<V>)
        return std::abs(v);
    else
        return v.cwiseAbs().maxCoeff();
}

template <class V>
V vabs(const V& v) {
    if constexpr (std::is_arithmetic_v<V>)
        return std::abs(v);
    else
        return v.cwiseAbs();
}

template <class V>
int vsize(const V& v) {
    if constexpr (std::is_arithmetic_v<V>)
        return 1;
    else
        return static_cast<int>(v.size());
}

template <class V>
double vget(const V& v, int i) {
    if constexpr (std::is_arithmetic_v<V>)
        return v;
    else
        return v[i];
}

template <class V>
void vset(V& v, int i, double x) {
    if constexpr (std::is_arithmetic_v<V>)
        v = x;
    else
        v[i] = x;
}

template <class F>
using value_t = std::decay_t<std::invoke_result_t<F&, double>>;

template <class F, class V = value_t<F>>
V fixed_gauss(F& f, double a, double b, const GaussRule& r) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    V acc = vzero<V>();
    for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(c + hw * r.x[i]);
    return V(hw * acc);
}

template <class F, class V = value_t<F>>
V fixed_gauss_abs(F& f, double a, double b, const GaussRule& r) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    V acc = vzero<V>();
    for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * vabs<V>(f(c + hw * r.x[i]));
    return V(std::abs(hw) * acc);
}

template <class F, class V = value_t<F>>
V adaptive_panel(F& f, double a, double b, const GaussRule& r, const V& whole, double tol,
                 int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    V left = fixed_gauss(f, a, m, r);
    V right = fixed_gauss(f, m, b, r);
    V both = left + right;
    if (vmag<V>(both - whole) <= tol || m == a || m == b) return both;
    if (depth >= max_depth)
        throw NonConvergence("adaptive quadrature exceeded max_depth on [" + std::to_string(a) +
                             ", " + std::to_string(b) + "]");
    V l = adaptive_panel(f, a, m, r, left, 0.5 * tol, depth + 1, max_depth);
    V rr = adaptive_panel(f, m, b, r, right, 0.5 * tol, depth + 1, max_depth);
    return V(l + rr);
}

inline double tolerance_floor() { return 1e-300; }

}  // namespace detail

// Adaptive Gauss-Legendre by bisection. abs_tol < 0 derives the target from
// rel_tol times an estimate of int |f|.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg,
                        double abs_tol = -1.0) {
    using V = detail::value_t<F>;
    if (a == b) return detail::vzero<V>();
    const GaussRule& r = gauss_legendre(cfg.gauss_order);
    if (abs_tol < 0.0) {
        V mag = detail::vzero<V>();
        const int probes = 4;
        for (int i = 0; i < probes; ++i) {
            const double lo = a + (b - a) * i / probes, hi = a + (b - a) * (i + 1) / probes;
            mag += detail::fixed_gauss_abs(f, lo, hi, r);
        }
        abs_tol = std::max(cfg.rel_tol * detail::vmag<V>(mag), detail::tolerance_floor());
    }
    V whole = detail::fixed_gauss(f, a, b, r);
    return detail::adaptive_panel(f, a, b, r, whole, abs_tol, 0, cfg.max_depth);
}

namespace detail {

// Geometric panels toward one endpoint with remainder extrapolation from the
// ratio of successive panel contributions.
template <class F, class V = value_t<F>>
V graded_impl(F& f, double a, double b, bool toward_a, const QuadratureConfig& cfg,
              double abs_tol) {
    const double L = b - a;
    const double sigma = kGradingRatio;
    const GaussRule& r = gauss_legendre(cfg.gauss_order);
    auto panel = [&](int k) {
        const double outer = L * std::pow(sigma, k), inner = L * std::pow(sigma, k + 1);
        return toward_a ? Panel{a + inner, a + outer} : Panel{b - outer, b - inner};
    };
    if (abs_tol < 0.0) {
        V mag = vzero<V>();
        for (int k = 0; k < 6; ++k) {
            Panel p = panel(k);
            mag += fixed_gauss_abs(f, p.lo, p.hi, r);
        }
        abs_tol = std::max(cfg.rel_tol * vmag<V>(mag), tolerance_floor());
    }
    const double panel_tol = abs_tol / 32.0;
    V total = vzero<V>();
    V prev = vzero<V>(), prev2 = vzero<V>();
    int growth = 0;
    for (int k = 0; k < cfg.max_depth; ++k) {
        Panel p = panel(k);
        V whole = fixed_gauss(f, p.lo, p.hi, r);
        V c = adaptive_panel(f, p.lo, p.hi, r, whole, panel_tol, 0, cfg.max_depth);
        total += c;
        if (k >= 2) {
            V rem = vzero<V>();
            double err = 0.0;
            bool defined = true;
            bool grows = false;
            for (int i = 0; i < vsize(c); ++i) {
                const double ck = vget(c, i), c1 = vget(prev, i), c2 = vget(prev2, i);
                if (std::abs(ck) <= 1e-3 * abs_tol && std::abs(c1) <= 1e-2 * abs_tol) {
                    err = std::max(err, std::abs(ck));
                    continue;
                }
                const double rk = (c1 != 0.0) ? ck / c1 : 2.0;
                const double rk1 = (c2 != 0.0) ? c1 / c2 : 2.0;
                if (rk > 0.0 && rk < 1.0) {
                    vset(rem, i, ck * rk / (1.0 - rk));
                    const double dr = std::abs(rk - rk1);
                    err = std::max(err, dr * std::abs(ck) / ((1.0 - rk) * (1.0 - rk)));
                } else {
                    if (rk >= 1.0 && std::abs(ck) > abs_tol) grows = true;
                    defined = false;
                }
            }
            growth = grows ? growth + 1 : 0;
            if (growth >= 6 && k >= 8)
                throw DivergenceError("graded quadrature: panel contributions grow toward the endpoint");
            if (defined && err <= abs_tol) return V(total + rem);
        }
        prev2 = prev;
        prev = c;
    }
    throw NonConvergence("graded quadrature did not converge within max_depth levels");
}

}  // namespace detail

// Integrand with an integrable singularity (or slow feature) at one endpoint.
template <class F>
auto integrate_graded(F&& f, double a, double b, const QuadratureConfig& cfg,
                      bool toward_a = true, double abs_tol = -1.0) {
    using V = detail::value_t<F>;
    if (a == b) return detail::vzero<V>();
    return detail::graded_impl(f, a, b, toward_a, cfg, abs_tol);
}

namespace detail {

// Estimate of int |f| over [a,b] from the first graded panels at both ends.
template <class F, class V = value_t<F>>
double graded_magnitude(F& f, double a, double b, const GaussRule& r) {
    const double H = 0.5 * (b - a);
    V mag = vzero<V>();
    for (int k = 0; k < 6; ++k) {
        const double outer = H * std::pow(kGradingRatio, k), inner = H * std::pow(kGradingRatio, k + 1);
        mag += fixed_gauss_abs(f, a + inner, a + outer, r);
        mag += fixed_gauss_abs(f, b - outer, b - inner, r);
    }
    return vmag<V>(mag);
}

template <class F>
auto to_unit_interval(F& f, double a, double scale) {
    using V = value_t<F>;
    return [&f, a, scale](double t) -> V {
        const double om = 1.0 - t;
        return V(f(a + scale * t / om) * (scale / (om * om)));
    };
}

}  // namespace detail

// Graded toward both endpoints (split at the midpoint).
template <class F>
auto integrate_both_graded(F&& f, double a, double b, const QuadratureConfig& cfg,
                           double abs_tol = -1.0) {
    using V = detail::value_t<F>;
    if (a == b) return detail::vzero<V>();
    if (abs_tol < 0.0)
        abs_tol = std::max(cfg.rel_tol * detail::graded_magnitude(f, a, b, gauss_legendre(cfg.gauss_order)),
                           detail::tolerance_floor());
    const double m = 0.5 * (a + b);
    V left = detail::graded_impl(f, a, m, true, cfg, 0.5 * abs_tol);
    V right = detail::graded_impl(f, m, b, false, cfg, 0.5 * abs_tol);
    return V(left + right);
}

// int_a^inf f via y = a + S t/(1-t), graded toward t = 0 and t = 1.
template <class F>
auto integrate_to_infinity(F&& f, double a, double scale, const QuadratureConfig& cfg,
                           double abs_tol = -1.0) {
    auto g = detail::to_unit_interval(f, a, scale);
    return integrate_both_graded(g, 0.0, 1.0, cfg, abs_tol);
}

// sum of int over [pts[i], pts[i+1]] plus int_{pts.back()}^inf when tail_scale > 0,
// with one tolerance shared by all pieces.
template <class F>
auto integrate_pieces(F&& f, const std::vector<double>& pts, double tail_scale, const QuadratureConfig& cfg) {
    using V = detail::value_t<F>;
    const GaussRule& r = gauss_legendre(cfg.gauss_order);
    auto g = detail::to_unit_interval(f, pts.back(), std::max(tail_scale, pts.back()));
    double mag = 0.0;
    int pieces = 0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1] > pts[i]) {
            mag += detail::graded_magnitude(f, pts[i], pts[i + 1], r);
            ++pieces;
        }
    if (tail_scale > 0.0) {
        mag += detail::graded_magnitude(g, 0.0, 1.0, r);
        ++pieces;
    }
    V acc = detail::vzero<V>();
    if (pieces == 0) return acc;
    const double tol = std::max(cfg.rel_tol * mag, detail::tolerance_floor()) / pieces;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1] > pts[i]) acc += integrate_both_graded(f, pts[i], pts[i + 1], cfg, tol);
    if (tail_scale > 0.0) acc += integrate_both_graded(g, 0.0, 1.0, cfg, tol);
    return acc;
}

// int_0^inf f(eps) d eps split at the sorted positive breakpoints.
template <class F>
auto integrate_half_line(F&& f, double scale, std::vector<double> breakpoints,
                         const QuadratureConfig& cfg) {
    std::vector<double> pts{0.0};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double p : breakpoints)
        if (p > pts.back()) pts.push_back(p);
    return integrate_pieces(f, pts, std::max(scale, pts.back()), cfg);
}

// int_A int_B f(x,y) |x-y|^{-exponent} dy dx. Identical and touching panels are
// split into triangles so the singular direction is a single graded variable;
// f must make the integrand integrable (vanish at x = y as needed).
template <class F>
auto pair_integral(F&& f, Panel A, Panel B, double exponent, const QuadratureConfig& cfg) {
    using V = std::decay_t<std::invoke_result_t<F&, double, double>>;
    if (A.lo == B.lo && A.hi == B.hi) {
        const double H = A.width();
        auto outer = [&](double r) -> V {
            // y = x - r and, after shifting, y = x + r
            auto inner = [&](double x) -> V { return V(f(x, x - r) + f(x - r, x)); };
            V val = integrate_adaptive(inner, A.lo + r, A.hi, cfg);
            return V(val * std::pow(r, -exponent));
        };
        return integrate_graded(outer, 0.0, H, cfg, true);
    }
    if (A.hi == B.lo || B.hi == A.lo) {
        // corner at c; u = distance of x from c inside A, v = distance of y inside B
        const bool a_left = (A.hi == B.lo);
        const double c = a_left ? A.hi : A.lo;
        const double hA = A.width(), hB = B.width();
        auto xy = [&](double u, double v) -> V {
            const double x = a_left ? c - u : c + u;
            const double y = a_left ? c + v : c - v;
            return V(f(x, y));
        };
        auto outer = [&](double z) -> V {
            auto inner = [&](double eta) -> V {
                // triangle 1: v/hB <= u/hA ; triangle 2: u/hA <= v/hB
                const double d1 = hA + eta * hB, d2 = eta * hA + hB;
                V t1 = xy(z * hA, z * eta * hB) * std::pow(d1, -exponent);
                V t2 = xy(z * eta * hA, z * hB) * std::pow(d2, -exponent);
                return V(t1 + t2);
            };
            V val = integrate_adaptive(inner, 0.0, 1.0, cfg);
            return V(val * (hA * hB * std::pow(z, 1.0 - exponent)));
        };
        return integrate_graded(outer, 0.0, 1.0, cfg, true);
    }
    if (A.hi > B.lo && B.hi > A.lo)
        throw DomainError("pair_integral: panels overlap without being identical");
    auto outer = [&](double x) -> V {
        auto inner = [&](double y) -> V { return V(f(x, y) * std::pow(std::abs(x - y), -exponent)); };
        return integrate_adaptive(inner, B.lo, B.hi, cfg);
    };
    return integrate_adaptive(outer, A.lo, A.hi, cfg);
}

double singular_pair_integral(const std::function<double(double, double)>& f, Panel A, Panel B,
                              double exponent, const QuadratureConfig& cfg = {});

// Sum of int over (-inf,a) and (b,inf). breakpoints are distances from the
// interval where g is not smooth.
double exterior_tail_integral(const std::function<double(double)>& g, const IntervalDomain& domain,
                              const QuadratureConfig& cfg = {},
                              const std::vector<double>& distance_breakpoints = {});

// C_{1,s} int_0^inf (2u(x) - u(x+h) - u(x-h)) h^{-1-2s} dh
double principal_value_laplacian(const SmoothFunction& u, const FractionalKernel& kernel, double x,
                                 const QuadratureConfig& cfg = {});

// J_k = int_0^h tau^k (d + tau)^{-e} dtau for k = 0, 1, 2.
std::array<double, 3> element_moments(double d, double h, double e);

// Fixed composite rule in distance eps in (0, inf) for integrands sampled on a
// mesh of width h. Integrand is assumed ~ eps^{boundary_exponent} as eps -> 0 and
// ~ eps^{-tail_decay} as eps -> inf (infinity for compact support).
struct ExteriorRule {
    std::vector<double> dist;
    std::vector<double> weight;
    size_t size() const { return dist.size(); }
};

ExteriorRule make_exterior_rule(double h, double length, double boundary_exponent, double tail_decay,
                                const std::vector<double>& breakpoints = {}, int order = 16);

}  // namespace fraclap
