#include "fraclap/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclap/errors.hpp"

namespace fraclap {

std::string to_string(Flavor f) {
    switch (f) {
        case Flavor::dirichlet: return "dirichlet";
        case Flavor::neumann: return "neumann";
        case Flavor::robin: return "robin";
        case Flavor::mu: return "mu";
    }
    return "unknown";
}

Flavor flavor_from_string(const std::string& s) {
    if (s == "dirichlet") return Flavor::dirichlet;
    if (s == "neumann") return Flavor::neumann;
    if (s == "robin") return Flavor::robin;
    if (s == "mu") return Flavor::mu;
    throw ValidationError("unknown flavor '" + s + "' (expected dirichlet|neumann|robin|mu)");
}

ExteriorWeight ExteriorWeight::zero() {
    ExteriorWeight w;
    w.fn_ = [](double) { return 0.0; };
    return w;
}

ExteriorWeight ExteriorWeight::constant_window(double c, double d_min, double d_max) {
    if (!(c >= 0.0)) throw ValidationError("constant_window: c must be >= 0");
    if (!(d_min >= 0.0 && d_max > d_min && std::isfinite(d_max)))
        throw ValidationError("constant_window: need 0 <= d_min < d_max < inf");
    ExteriorWeight w;
    w.kind_ = Kind::constant_window;
    w.fn_ = [=](double d) { return (d >= d_min && d <= d_max) ? c : 0.0; };
    w.breakpoints_ = {d_min, d_max};
    std::ostringstream os;
    os << "constant_window(c=" << c << ", [" << d_min << ", " << d_max << "])";
    w.label_ = os.str();
    return w;
}

ExteriorWeight ExteriorWeight::algebraic_decay(double c, double p) {
    if (!(c >= 0.0)) throw ValidationError("algebraic_decay: c must be >= 0");
    if (!(p > 1.0)) throw ValidationError("algebraic_decay: power p must exceed 1 for integrability");
    ExteriorWeight w;
    w.kind_ = Kind::algebraic_decay;
    w.fn_ = [=](double d) { return c * std::pow(1.0 + d, -p); };
    w.tail_decay_ = p;
    std::ostringstream os;
    os << "algebraic_decay(c=" << c << ", p=" << p << ")";
    w.label_ = os.str();
    return w;
}

ExteriorWeight ExteriorWeight::tabulated(std::vector<double> dist, std::vector<double> values) {
    if (dist.empty() || dist.size() != values.size())
        throw ValidationError("tabulated weight: need equally many distances and values");
    for (size_t i = 0; i < dist.size(); ++i) {
        if (!(values[i] >= 0.0)) throw ValidationError("tabulated weight: values must be >= 0");
        if (!(dist[i] >= 0.0 && std::isfinite(dist[i])))
            throw ValidationError("tabulated weight: distances must be finite and >= 0");
        if (i > 0 && !(dist[i] > dist[i - 1]))
            throw ValidationError("tabulated weight: distances must be strictly increasing");
    }
    ExteriorWeight w;
    w.kind_ = Kind::tabulated;
    w.fn_ = [dist, values](double d) {
        if (d <= dist.front()) return values.front();
        if (d > dist.back()) return 0.0;
        const auto it = std::upper_bound(dist.begin(), dist.end(), d);
        const size_t k = static_cast<size_t>(it - dist.begin());
        if (k >= dist.size()) return values.back();
        const double t = (d - dist[k - 1]) / (dist[k] - dist[k - 1]);
        return (1.0 - t) * values[k - 1] + t * values[k];
    };
    w.breakpoints_ = dist;
    w.label_ = "tabulated(" + std::to_string(dist.size()) + " samples)";
    return w;
}

ExteriorWeight ExteriorWeight::custom(std::function<double(double)> of_distance, double boundary_exponent,
                                      double tail_decay, std::vector<double> breakpoints,
                                      std::string label) {
    ExteriorWeight w;
    w.kind_ = Kind::custom;
    w.fn_ = std::move(of_distance);
    w.boundary_exponent_ = boundary_exponent;
    w.tail_decay_ = tail_decay;
    w.breakpoints_ = std::move(breakpoints);
    w.label_ = std::move(label);
    return w;
}

double ExteriorWeight::at_distance(double d) const { return fn_(d); }

double ExteriorWeight::operator()(const IntervalDomain& domain, double y) const {
    if (y > domain.a && y < domain.b) throw DomainError("exterior weight evaluated inside the interval");
    return fn_(domain.distance_to_boundary(y));
}

ExteriorWeight ExteriorWeight::scaled(double lambda) const {
    if (!(lambda >= 0.0)) throw ValidationError("weight scale must be >= 0");
    if (is_zero()) return *this;
    ExteriorWeight w = *this;
    auto f = fn_;
    w.fn_ = [f, lambda](double d) { return lambda * f(d); };
    std::ostringstream os;
    os << lambda << "*" << label_;
    w.label_ = os.str();
    return w;
}

ExteriorWeight robin_equivalent_density(const ExteriorWeight& beta, const FractionalKernel& kernel,
                                        const IntervalDomain& domain) {
    if (beta.is_zero()) return ExteriorWeight::zero();
    const double C = kernel.c_ns, s = kernel.s, L = domain.length();
    auto f = [beta, C, s, L](double d) {
        const double b = beta.at_distance(d);
        if (b == 0.0) return 0.0;
        const double r = power_integral(d, d + L, -2.0 * s);
        return C * b * r / (C * r + b);
    };
    // bounded by beta near the interval, by min(beta, C rho) far away
    const double tail = std::max(beta.tail_decay(), 1.0 + 2.0 * s);
    return ExteriorWeight::custom(f, std::min(0.0, beta.boundary_exponent()), tail, beta.breakpoints(),
                                  "robin_density[" + beta.label() + "]");
}

ExteriorWeight rho_density(double factor, const FractionalKernel& kernel, const IntervalDomain& domain) {
    const double C = kernel.c_ns, s = kernel.s, L = domain.length();
    auto f = [=](double d) { return factor * C * power_integral(d, d + L, -2.0 * s); };
    std::ostringstream os;
    os << factor << "*C*rho";
    return ExteriorWeight::custom(f, -2.0 * s, 1.0 + 2.0 * s, {}, os.str());
}

void ElementKernelIntegrals::compute(double eps, double h, int N, double exponent) {
    i0.resize(N);
    near.resize(N);
    far.resize(N);
    nn.resize(N);
    nf.resize(N);
    ff.resize(N);
    for (int j = 0; j < N; ++j) {
        const auto J = element_moments(eps + j * h, h, exponent);
        const double j1 = J[1] / h, j2 = J[2] / (h * h);
        i0[j] = J[0];
        far[j] = j1;
        near[j] = J[0] - j1;
        ff[j] = j2;
        nf[j] = j1 - j2;
        nn[j] = J[0] - 2.0 * j1 + j2;
    }
}

ExtendedField::ExtendedField(Field interior, Flavor flavor, FractionalKernel kernel, IntervalDomain domain,
                             ExteriorWeight beta)
    : interior_(std::move(interior)),
      flavor_(flavor),
      kernel_(kernel),
      domain_(domain),
      beta_(std::move(beta)) {
    if (interior_.mesh.a != domain_.a || interior_.mesh.b != domain_.b)
        throw DomainError("extend: mesh must cover exactly the domain");
    if (flavor_ == Flavor::mu) throw DomainError("extend: the mu flavor has no pointwise extension");
}

double ExtendedField::checked_distance(double x) const {
    const double d = domain_.distance_to_boundary(x);
    if (d < 1e-12) throw DomainError("extension evaluated within 1e-12 of the boundary");
    return std::max(d, 1e-10);
}

double ExtendedField::shifted_moment(double x) const {
    if (x >= domain_.a && x <= domain_.b) throw DomainError("moment: point must lie outside [a,b]");
    const double eps = checked_distance(x);
    const Mesh& m = interior_.mesh;
    const bool right = x > domain_.b;
    auto local = [&](int l) { return interior_.coeffs[right ? m.N - l : l]; };
    ElementKernelIntegrals I;
    I.compute(eps, m.h(), m.N, kernel_.exponent());
    const double u0 = local(0);
    double acc = 0.0;
    for (int j = 0; j < m.N; ++j) acc += (local(j) - u0) * I.near[j] + (local(j + 1) - u0) * I.far[j];
    return acc;
}

double ExtendedField::moment(double x) const {
    const double u0 = interior_.coeffs[x > domain_.b ? interior_.mesh.N : 0];
    return u0 * rho(domain_, kernel_, x) + shifted_moment(x);
}

double ExtendedField::exterior(double x) const {
    if (x >= domain_.a && x <= domain_.b) throw DomainError("exterior evaluation inside [a,b]");
    if (flavor_ == Flavor::dirichlet) return 0.0;
    const double u0 = interior_.coeffs[x > domain_.b ? interior_.mesh.N : 0];
    const double r = rho(domain_, kernel_, x);
    const double S = shifted_moment(x);
    const double uN = u0 + S / r;
    if (flavor_ == Flavor::neumann) return uN;
    const double C = kernel_.c_ns;
    const double b = beta_(domain_, x);
    return C * r / (C * r + b) * uN;
}

double ExtendedField::operator()(double x) const {
    if (x >= domain_.a && x <= domain_.b) return interior_(x);
    return exterior(x);
}

ExtendedField extend(const Field& u, Flavor flavor, const FractionalKernel& kernel, const IntervalDomain& domain,
                     const ExteriorWeight& beta) {
    if (flavor == Flavor::robin && !(beta.at_distance(1.0) >= 0.0))
        throw ValidationError("extend: Robin flavor needs a nonnegative weight");
    return ExtendedField(u, flavor, kernel, domain, beta);
}

namespace {

double normal_derivative_impl(const std::function<double(double)>& v, double vx, const FractionalKernel& k,
                              const IntervalDomain& d, double x, const std::vector<double>& nodes,
                              const QuadratureConfig& cfg) {
    const double e = k.exponent();
    auto g = [&](double y) { return (vx - v(y)) * std::pow(std::abs(x - y), -e); };
    const bool right = x > d.b;
    const int panels = static_cast<int>(nodes.size()) - 1;
    auto adjacent = [&](int i) { return right ? i + 1 == panels : i == 0; };
    // each panel gets half its own share plus an even split of the total, so panels
    // that integrate to ~0 do not demand a relative tolerance
    const GaussRule& r = gauss_legendre(cfg.gauss_order);
    auto ag = [&](double y) { return std::abs(g(y)); };
    std::vector<double> mag(panels);
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        mag[i] = adjacent(i) ? detail::graded_magnitude(ag, nodes[i], nodes[i + 1], r)
                             : detail::fixed_gauss(ag, nodes[i], nodes[i + 1], r);
        total += mag[i];
    }
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = nodes[i], hi = nodes[i + 1];
        const double tol = std::max(0.5 * cfg.rel_tol * (mag[i] + total / panels), detail::tolerance_floor());
        if (adjacent(i))
            acc += integrate_graded(g, lo, hi, cfg, /*toward_a=*/!right, tol);
        else
            acc += integrate_adaptive(g, lo, hi, cfg, tol);
    }
    return k.c_ns * acc;
}

}  // namespace

double nonlocal_normal_derivative(const ExtendedField& v, const FractionalKernel& kernel,
                                  const IntervalDomain& domain, double x, const QuadratureConfig& cfg) {
    cfg.validate();
    if (x >= domain.a && x <= domain.b) throw DomainError("normal derivative: point must lie outside [a,b]");
    if (domain.distance_to_boundary(x) < 1e-12) throw DomainError("normal derivative: point too close to boundary");
    const Eigen::VectorXd xs = v.interior().mesh.coordinates();
    std::vector<double> nodes(xs.data(), xs.data() + xs.size());
    const Field& f = v.interior();
    return normal_derivative_impl([&](double y) { return f(y); }, v.exterior(x), kernel, domain, x, nodes, cfg);
}

double nonlocal_normal_derivative(const std::function<double(double)>& v, const FractionalKernel& kernel,
                                  const IntervalDomain& domain, double x, const QuadratureConfig& cfg) {
    cfg.validate();
    if (x >= domain.a && x <= domain.b) throw DomainError("normal derivative: point must lie outside [a,b]");
    const double m = 0.5 * (domain.a + domain.b);
    return normal_derivative_impl(v, v(x), kernel, domain, x, {domain.a, m, domain.b}, cfg);
}

}  // namespace fraclap
