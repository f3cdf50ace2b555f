#include "fraclap/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "fraclap/errors.hpp"
#include "fraclap/parallel.hpp"

#ifndef FRACLAP_GIT_DESCRIBE
#define FRACLAP_GIT_DESCRIBE "unknown"
#endif

namespace fraclap {

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_short(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double rel_gap(double x, double y) {
    const double d = std::max(std::abs(x), std::abs(y));
    return d == 0.0 ? 0.0 : std::abs(x - y) / d;
}

// expm1(x) / x
double phi1(double x) { return std::abs(x) < 1e-10 ? 1.0 + 0.5 * x : std::expm1(x) / x; }

// t^{1+q}/q - t/q, finite at q = 0
double shifted_power(double t, double q) {
    const double l = std::log(t);
    return t * l * phi1(q * l);
}

// Inner integrals of nested quadratures run tighter so the outer one sees a smooth integrand.
QuadratureConfig tighter(const QuadratureConfig& q) {
    QuadratureConfig t = q;
    t.rel_tol = std::max(q.rel_tol * 1e-3, 1e-13);
    return t;
}

void require_derivatives(const SmoothFunction& u, const char* who) {
    if (!u.value || !u.d1 || !u.d2) throw ValidationError(std::string(who) + ": u needs value, d1 and d2");
}

// One side of the exterior seen as y = b + eps; u given on the real line.
struct Side {
    std::function<double(double)> u, du, d2u, v;
    double b = 0.0;
    std::vector<double> interior_breaks;  // breakpoints of u inside (b - L, b)
    std::vector<double> exterior_breaks;  // breakpoints of u beyond b, as distances
};

Side right_side(const SmoothFunction& u, const std::function<double(double)>& v, const IntervalDomain& d) {
    Side S;
    S.u = u.value;
    S.du = u.d1;
    S.d2u = u.d2;
    S.v = v;
    S.b = d.b;
    for (double bp : u.breakpoints) {
        if (bp > d.a && bp < d.b) S.interior_breaks.push_back(bp);
        if (bp > d.b) S.exterior_breaks.push_back(bp - d.b);
    }
    return S;
}

Side left_side(const SmoothFunction& u, const std::function<double(double)>& v, const IntervalDomain& d) {
    Side S;
    auto f = u.value, f1 = u.d1, f2 = u.d2;
    S.u = [f](double x) { return f(-x); };
    S.du = [f1](double x) { return -f1(-x); };
    S.d2u = [f2](double x) { return f2(-x); };
    S.v = [v](double x) { return v(-x); };
    S.b = -d.a;
    for (double bp : u.breakpoints) {
        if (bp > d.a && bp < d.b) S.interior_breaks.push_back(-bp);
        if (bp < d.a) S.exterior_breaks.push_back(d.a - bp);
    }
    return S;
}

// int_0^inf v(b+eps) N^s u(b+eps) d eps. N^s u = C [u'(y) P(eps) - u''(y)/2 P2(eps) + R(eps)].
double side_flux(const Side& S, double L, double scale, const FractionalKernel& k, const QuadratureConfig& cfg) {
    const double s = k.s, e = k.exponent();
    auto P = [&](double eps) { return power_integral(eps, eps + L, 1.0 - 2.0 * s); };
    auto P2 = [&](double eps) { return power_integral(eps, eps + L, 2.0 - 2.0 * s); };
    std::vector<double> taus;
    for (double bp : S.interior_breaks) taus.push_back(S.b - bp);
    std::sort(taus.begin(), taus.end());
    taus.push_back(L);
    // below `small` the Taylor remainder is integrated in exact form
    const double small = 0.25 * scale;
    const QuadratureConfig icfg = tighter(cfg);

    auto Rfun = [&](double eps) {
        const double y = S.b + eps;
        const double uy = S.u(y), du = S.du(y), d2 = S.d2u(y);
        auto f = [&](double tau) {
            const double t = eps + tau;
            double br;
            if (t < small) {
                // B(t) = int_0^t (t - z) (u''(y) - u''(y - z)) dz, free of cancellation
                const GaussRule& gr = gauss_legendre(16);
                br = 0.0;
                for (size_t i = 0; i < gr.x.size(); ++i) {
                    const double z = 0.5 * t * (1.0 + gr.x[i]);
                    br += gr.w[i] * (t - z) * (d2 - S.d2u(y - z));
                }
                br *= 0.5 * t;
            } else
                br = uy - S.u(S.b - tau) - du * t + 0.5 * d2 * t * t;  // y - t == b - tau
            return br * std::pow(t, -e);
        };
        std::vector<double> cuts = taus;
        if (small > eps && small - eps < L) cuts.push_back(small - eps);
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0, lo = 0.0;
        for (double c : cuts) {
            if (c <= lo) continue;
            acc += lo == 0.0 ? integrate_graded(f, lo, c, icfg, true) : integrate_adaptive(f, lo, c, icfg);
            lo = c;
        }
        return -0.5 * d2 * P2(eps) + acc;
    };

    const double D = 0.5 * std::min(L, scale);
    auto g = [&](double eps) { return S.v(S.b + eps) * S.du(S.b + eps); };
    const double g0 = g(0.0);
    const double q = 1.0 - 2.0 * s;
    const double Z = (shifted_power(D + L, q) - shifted_power(L, q) - shifted_power(D, q)) / (2.0 - 2.0 * s);

    double acc = g0 * Z;
    acc += integrate_graded([&](double eps) { return (g(eps) - g0) * P(eps); }, 0.0, D, cfg, true);
    acc += integrate_to_infinity([&](double eps) { return g(eps) * P(eps); }, D, scale, cfg);
    std::vector<double> bps = S.exterior_breaks;
    bps.push_back(D);
    acc += integrate_half_line([&](double eps) { return S.v(S.b + eps) * Rfun(eps); }, scale, bps, cfg);
    return k.c_ns * acc;
}

std::vector<Panel> split_interval(double a, double b, int P, const std::vector<double>& extra) {
    std::vector<double> pts;
    for (int i = 0; i <= P; ++i) pts.push_back(i == P ? b : a + (b - a) * i / P);
    for (double x : extra)
        if (x > a && x < b) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Panel> out;
    for (size_t i = 0; i + 1 < pts.size(); ++i) out.push_back({pts[i], pts[i + 1]});
    return out;
}

// C/2 sum over panel pairs of int int f(x,y) |x-y|^{-e}
double omega_omega(const std::function<double(double, double)>& f, const std::vector<Panel>& panels,
                   const FractionalKernel& k, const QuadratureConfig& cfg, bool diagonal = true) {
    std::vector<std::pair<int, int>> pairs;
    const int P = static_cast<int>(panels.size());
    for (int i = 0; i < P; ++i)
        for (int j = diagonal ? i : i + 1; j < P; ++j) pairs.emplace_back(i, j);
    std::vector<double> vals(pairs.size(), 0.0);
    parallel_for(static_cast<int>(pairs.size()), [&](int idx) {
        const auto [i, j] = pairs[idx];
        const double w = i == j ? 1.0 : 2.0;
        vals[idx] = w * pair_integral(f, panels[i], panels[j], k.exponent(), cfg);
    });
    double acc = 0.0;
    for (double v : vals) acc += v;
    return 0.5 * k.c_ns * acc;
}

// int_Omega h(x) |x-y|^{-e} dx for y at distance eps beyond b (side 0) or a (side 1).
// On the end panel the integrand is h_near(tau) with x = end -+ tau, so the distance
// tau + eps is exact.
double panel_integral_from_outside(const std::function<double(double)>& h, const std::function<double(double)>& h_near,
                                   int side, double eps, const std::vector<Panel>& panels, double e,
                                   const QuadratureConfig& cfg) {
    const int n = static_cast<int>(panels.size());
    const int near = side == 0 ? n - 1 : 0;
    const double end = side == 0 ? panels.back().hi : panels.front().lo;
    auto g = [&](double x) { return h(x) * std::pow(std::abs(end - x) + eps, -e); };
    auto gn = [&](double tau) { return h_near(tau) * std::pow(tau + eps, -e); };
    const double H = panels[near].width();
    const GaussRule& r = gauss_legendre(cfg.gauss_order);
    auto ag = [&](double x) { return std::abs(g(x)); };
    auto agn = [&](double tau) { return std::abs(gn(tau)); };
    // per panel: half its own share plus an even split of the total
    std::vector<double> mag(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        mag[i] = i == near ? detail::graded_magnitude(agn, 0.0, H, r)
                           : detail::fixed_gauss(ag, panels[i].lo, panels[i].hi, r);
        total += mag[i];
    }
    auto tol = [&](int i) { return std::max(0.5 * cfg.rel_tol * (mag[i] + total / n), detail::tolerance_floor()); };
    double acc = integrate_graded(gn, 0.0, H, cfg, true, tol(near));
    for (int i = 0; i < n; ++i)
        if (i != near) acc += integrate_adaptive(g, panels[i].lo, panels[i].hi, cfg, tol(i));
    return acc;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = U(rng);
    return v;
}

void snapshot(VerificationReport& r, const Mesh& mesh, const FractionalKernel& k, std::uint64_t seed) {
    r.set("s", k.s);
    r.set("N", static_cast<double>(mesh.N));
    r.set("h", mesh.h());
    r.set("seed", std::to_string(seed));
}

struct Flavors {
    FormMatrices D, R, N;
};

Flavors assemble_all(const Mesh& mesh, const FractionalKernel& k, const IntervalDomain& d, const ExteriorWeight& beta) {
    return {assemble_dirichlet(mesh, k, d), assemble_robin(mesh, k, d, beta), assemble_neumann(mesh, k, d)};
}

}  // namespace

// ---------------------------------------------------------------- report

void VerificationReport::add(const std::string& description, double measured, double bound) {
    cases.push_back({description, measured, bound, measured <= bound});
}

void VerificationReport::record(const std::string& description, double measured) {
    cases.push_back({description, measured, std::numeric_limits<double>::infinity(), !std::isnan(measured)});
}

void VerificationReport::set(const std::string& key, double value) { config[key] = fmt17(value); }
void VerificationReport::set(const std::string& key, const std::string& value) { config[key] = value; }

bool VerificationReport::passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const VerificationCase& c) { return c.pass; });
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["git_describe"] = build_describe();
    auto num = [](double x) -> nlohmann::json {
        if (std::isfinite(x)) return x;
        if (std::isnan(x)) return "nan";
        return x > 0 ? "inf" : "-inf";
    };
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : cases)
        cs.push_back({{"description", c.description},
                      {"measured", num(c.measured)},
                      {"bound", num(c.bound)},
                      {"pass", c.pass}});
    j["cases"] = cs;
    j["config"] = config;
    j["notes"] = notes;
    return j;
}

std::string VerificationReport::to_text() const {
    std::ostringstream os;
    os << "suite " << suite << ": " << (passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& [k, v] : config) os << "  # " << k << " = " << v << "\n";
    for (const auto& c : cases) {
        char line[96];
        std::snprintf(line, sizeof line, "measured=%.6e bound=%.6e", c.measured, c.bound);
        os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.description << ": " << line << "\n";
    }
    for (const auto& n : notes) os << "  note: " << n << "\n";
    return os.str();
}

std::string build_describe() { return FRACLAP_GIT_DESCRIBE; }

// ---------------------------------------------------------------- pipelines

double interior_laplacian_integral(const SmoothFunction& u, const std::function<double(double)>& v,
                                   const FractionalKernel& kernel, const IntervalDomain& domain,
                                   const QuadratureConfig& quad) {
    require_derivatives(u, "interior_laplacian_integral");
    const QuadratureConfig inner = tighter(quad);
    auto f = [&](double x) { return v(x) * principal_value_laplacian(u, kernel, x, inner); };
    double acc = 0.0;
    for (const Panel& p : split_interval(domain.a, domain.b, 4, u.breakpoints))
        acc += integrate_adaptive(f, p.lo, p.hi, quad);
    return acc;
}

double exterior_flux(const SmoothFunction& u, const std::function<double(double)>& v, const FractionalKernel& kernel,
                     const IntervalDomain& domain, const QuadratureConfig& quad) {
    require_derivatives(u, "exterior_flux");
    const double L = domain.length();
    const double scale = std::min(u.scale, L);
    return side_flux(right_side(u, v, domain), L, scale, kernel, quad) +
           side_flux(left_side(u, v, domain), L, scale, kernel, quad);
}

double form_energy(const SmoothFunction& u, const SmoothFunction& v, const FractionalKernel& kernel,
                   const IntervalDomain& domain, const QuadratureConfig& quad, int panels) {
    std::vector<double> bps = u.breakpoints;
    bps.insert(bps.end(), v.breakpoints.begin(), v.breakpoints.end());
    const auto P = split_interval(domain.a, domain.b, panels, bps);
    auto f = [&](double x, double y) { return (u(x) - u(y)) * (v(x) - v(y)); };
    double acc = omega_omega(f, P, kernel, quad);

    const double L = domain.length();
    const double scale = std::min(std::min(u.scale, v.scale), L);
    for (int side = 0; side < 2; ++side) {
        std::vector<double> ext;
        for (double bp : bps) {
            if (side == 0 && bp > domain.b) ext.push_back(bp - domain.b);
            if (side == 1 && bp < domain.a) ext.push_back(domain.a - bp);
        }
        auto outer = [&](double eps) {
            const double y = side == 0 ? domain.b + eps : domain.a - eps;
            const double uy = u(y), vy = v(y);
            auto h = [&](double x) { return (u(x) - uy) * (v(x) - vy); };
            const double end = side == 0 ? domain.b : domain.a;
            auto hn = [&](double tau) { return h(side == 0 ? end - tau : end + tau); };
            return panel_integral_from_outside(h, hn, side, eps, P, kernel.exponent(), quad);
        };
        acc += kernel.c_ns * integrate_half_line(outer, scale, ext, quad);
    }
    return acc;
}

double full_line_pairing(const SmoothFunction& u, const SmoothFunction& v, const FractionalKernel& kernel,
                         const QuadratureConfig& quad) {
    require_derivatives(u, "full_line_pairing");
    std::vector<double> pts = u.breakpoints;
    if (pts.empty()) pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    const QuadratureConfig inner = tighter(quad);
    auto f = [&](double x) { return v(x) * principal_value_laplacian(u, kernel, x, inner); };
    double acc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) acc += integrate_adaptive(f, pts[i], pts[i + 1], quad);
    acc += integrate_to_infinity(f, pts.back(), u.scale, quad);
    const double lo = pts.front();
    acc += integrate_to_infinity([&](double x) { return f(2.0 * lo - x); }, lo, u.scale, quad);
    return acc;
}

double extended_energy(const ExtendedField& w, const FractionalKernel& kernel, const IntervalDomain& domain,
                       const QuadratureConfig& quad) {
    const Field& u = w.interior();
    const Mesh& m = u.mesh;
    std::vector<Panel> P;
    for (int i = 0; i < m.N; ++i) P.push_back({m.node(i), m.node(i + 1)});
    auto f = [&](double x, double y) {
        const double d = u(x) - u(y);
        return d * d;
    };
    // same-element pairs in closed form: (u(x)-u(y))^2 = slope^2 (x-y)^2 there, and
    // quadrature of the rounded difference stalls near the diagonal for s > 1/2
    const double ex = kernel.exponent();
    double diag = 0.0;
    for (int i = 0; i < m.N; ++i) {
        const double H = P[i].width();
        const double slope = (u.coeffs[i + 1] - u.coeffs[i]) / H;
        diag += 2.0 * slope * slope * std::pow(H, 4.0 - ex) / ((3.0 - ex) * (4.0 - ex));
    }
    double acc = omega_omega(f, P, kernel, quad, /*diagonal=*/false) + 0.5 * kernel.c_ns * diag;

    // the last 1e-10 |Omega| next to the boundary is dropped; the integrand is bounded there
    const double eps0 = 1e-10 * domain.length();
    const QuadratureConfig inner = tighter(quad);
    std::vector<double> bps;
    for (double bp : w.beta().breakpoints())
        if (bp > eps0) bps.push_back(bp - eps0);
    for (int side = 0; side < 2; ++side) {
        auto outer = [&](double e) {
            const double eps = eps0 + e;
            const double y = side == 0 ? domain.b + eps : domain.a - eps;
            // u(x) - W = (u(x) - u(end)) + (u(end) - W); the first part is linear in tau on the end element
            const int ie = side == 0 ? m.N : 0, in = side == 0 ? m.N - 1 : 1;
            const double end = m.node(ie), ue = u.coeffs[ie];
            const double slope = (u.coeffs[ie] - u.coeffs[in]) / (end - m.node(in));
            const double gap = ue - w.exterior(y);
            auto h = [&](double x) {
                const double d = u(x) - ue + gap;
                return d * d;
            };
            auto hn = [&](double tau) {
                const double d = gap - slope * (side == 0 ? tau : -tau);
                return d * d;
            };
            return panel_integral_from_outside(h, hn, side, eps, P, kernel.exponent(), inner);
        };
        acc += kernel.c_ns * integrate_half_line(outer, domain.length(), bps, quad);
    }
    return acc;
}

// ---------------------------------------------------------------- suites

VerificationReport check_divergence_theorem(const SmoothFunction& u, const FractionalKernel& kernel,
                                            const IntervalDomain& domain, const QuadratureConfig& quad) {
    VerificationReport r;
    r.suite = "divergence_theorem";
    r.set("s", kernel.s);
    r.set("rel_tol", quad.rel_tol);
    auto one = [](double) { return 1.0; };
    const double lhs = interior_laplacian_integral(u, one, kernel, domain, quad);
    const double flux = exterior_flux(u, one, kernel, domain, quad);
    r.record("int_Omega (-Delta)^s u", lhs);
    r.record("-int_ext N^s u", -flux);
    r.add("relative gap", rel_gap(lhs, -flux), 1e-3);
    return r;
}

VerificationReport check_integration_by_parts(const SmoothFunction& u, const SmoothFunction& v,
                                              const FractionalKernel& kernel, const IntervalDomain& domain,
                                              const QuadratureConfig& quad) {
    VerificationReport r;
    r.suite = "integration_by_parts";
    r.set("s", kernel.s);
    r.set("rel_tol", quad.rel_tol);
    const double lhs = interior_laplacian_integral(u, v.value, kernel, domain, quad);
    const double E = form_energy(u, v, kernel, domain, quad);
    const double F = exterior_flux(u, v.value, kernel, domain, quad);
    r.record("int_Omega v (-Delta)^s u", lhs);
    r.record("E(u,v)", E);
    r.record("int_ext v N^s u", F);
    const double mag = std::max({std::abs(lhs), std::abs(E), std::abs(F)});
    r.add("relative gap", mag == 0.0 ? 0.0 : std::abs(lhs - (E - F)) / mag, 1e-3);

    // u supported inside Omega: the form is the full-line pairing
    const double L = domain.length();
    const SmoothFunction uc = compact_bump(1.0, domain.a + 0.45 * L, 0.3 * L);
    const double Ec = form_energy(uc, v, kernel, domain, quad);
    const double full = full_line_pairing(uc, v, kernel, quad);
    r.record("E(u_c,v), u_c supported in Omega", Ec);
    r.add("relative gap to int_R v (-Delta)^s u_c", rel_gap(Ec, full), 1e-3);
    return r;
}

VerificationReport check_s_to_one_limit(const SmoothFunction& u, const SmoothFunction& v,
                                        const IntervalDomain& domain, const std::vector<double>& s_grid,
                                        const QuadratureConfig& quad) {
    require_derivatives(u, "check_s_to_one_limit");
    VerificationReport r;
    r.suite = "s_to_one_limit";
    r.set("rel_tol", quad.rel_tol);
    if (s_grid.empty()) throw ValidationError("check_s_to_one_limit: empty s grid");
    const double target = v(domain.a) * (-u.d1(domain.a)) + v(domain.b) * u.d1(domain.b);
    r.record("boundary target v(a)(-u'(a)) + v(b)u'(b)", target);
    std::vector<double> gaps(s_grid.size());
    for (size_t i = 0; i < s_grid.size(); ++i) {
        const FractionalKernel k(s_grid[i]);
        const double F = exterior_flux(u, v.value, k, domain, quad);
        gaps[i] = target == 0.0 ? std::abs(F) : std::abs(F - target) / std::abs(target);
        r.record("int_ext v N^s u at s=" + fmt_short(s_grid[i]), F);
        r.record("relative gap at s=" + fmt_short(s_grid[i]), gaps[i]);
    }
    for (size_t i = 1; i < gaps.size(); ++i)
        r.add("gap decrease s=" + fmt_short(s_grid[i - 1]) + " -> " + fmt_short(s_grid[i]), gaps[i] - gaps[i - 1], 0.0);
    r.add("relative gap at s=" + fmt_short(s_grid.back()), gaps.back(), 0.05);
    // no symmetry claim: swapped roles only recorded
    if (u.d1 && v.d1 && v.d2) {
        const double Fs = exterior_flux(v, u.value, FractionalKernel(s_grid.back()), domain, quad);
        r.record("int_ext u N^s v (swapped) at s=" + fmt_short(s_grid.back()), Fs);
    }
    return r;
}

VerificationReport check_form_ordering(const Mesh& mesh, const FractionalKernel& kernel,
                                       const IntervalDomain& domain, const ExteriorWeight& beta,
                                       std::uint64_t seed, int samples) {
    VerificationReport r;
    r.suite = "form_ordering";
    snapshot(r, mesh, kernel, seed);
    r.set("beta", beta.label());
    const Flavors F = assemble_all(mesh, kernel, domain, beta);
    std::mt19937_64 rng(seed);
    double worst_nr = -std::numeric_limits<double>::infinity(), worst_rd = worst_nr;
    const double knorm = F.D.norm();
    for (int k = 0; k < samples; ++k) {
        const Eigen::VectorXd xi = random_vector(rng, F.D.size(), -1.0, 1.0);
        const Eigen::VectorXd x = F.D.expand(xi);
        const double qN = x.dot(F.N.stiffness * x);
        const double qR = x.dot(F.R.stiffness * x);
        const double qD = xi.dot(F.D.stiffness * xi);
        const double scale = knorm * x.squaredNorm();
        worst_nr = std::max(worst_nr, (qN - qR) / scale);
        worst_rd = std::max(worst_rd, (qR - qD) / scale);
    }
    r.add("max (x'K_N x - x'K_R x) / scale", worst_nr, 1e-10);
    r.add("max (x'K_R x - x'K_D x) / scale", worst_rd, 1e-10);
    r.notes.push_back("sampled property: " + std::to_string(samples) + " random interior-supported vectors");
    return r;
}

VerificationReport check_domination(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                                    const ExteriorWeight& beta, const std::vector<double>& t_grid,
                                    std::uint64_t seed, int samples) {
    VerificationReport r;
    r.suite = "domination";
    snapshot(r, mesh, kernel, seed);
    r.set("beta", beta.label());
    const Flavors F = assemble_all(mesh, kernel, domain, beta);
    const SpectralSemigroup D = eigendecompose(F.D), R = eigendecompose(F.R), N = eigendecompose(F.N);
    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> fs;
    for (int k = 0; k < samples; ++k) fs.push_back(random_vector(rng, mesh.nodes(), -1.0, 1.0));
    for (double t : t_grid) {
        double w1 = -std::numeric_limits<double>::infinity(), w2 = w1, w3 = w1;
        for (const Eigen::VectorXd& f : fs) {
            const double fn = f.cwiseAbs().maxCoeff();
            const Eigen::VectorXd af = f.cwiseAbs();
            const Eigen::VectorXd TD = F.D.expand(D.apply(F.D.restrict_nodes(f), t));
            const Eigen::VectorXd TRf = R.apply(f, t);
            const Eigen::VectorXd TRa = R.apply(af, t);
            const Eigen::VectorXd TNa = N.apply(af, t);
            w1 = std::max(w1, (TD.cwiseAbs() - TRa).maxCoeff() / fn);
            w2 = std::max(w2, (TRf.cwiseAbs() - TNa).maxCoeff() / fn);
            w3 = std::max(w3, (TRa - TNa).maxCoeff() / fn);
        }
        r.add("t=" + fmt_short(t) + " max(|T_D f| - T_R|f|) / |f|_inf", w1, 1e-6);
        r.add("t=" + fmt_short(t) + " max(|T_R f| - T_N|f|) / |f|_inf", w2, 1e-6);
        r.add("t=" + fmt_short(t) + " max(T_R|f| - T_N|f|) / |f|_inf", w3, 1e-6);
    }
    r.notes.push_back("sampled property: " + std::to_string(samples) + " random mixed-sign f per t");
    return r;
}

VerificationReport check_submarkov(const Mesh& mesh, const FractionalKernel& kernel, const IntervalDomain& domain,
                                   const ExteriorWeight& beta, const std::vector<double>& t_grid,
                                   std::uint64_t seed, int samples) {
    VerificationReport r;
    r.suite = "submarkov";
    snapshot(r, mesh, kernel, seed);
    r.set("beta", beta.label());
    const Flavors F = assemble_all(mesh, kernel, domain, beta);
    const FormMatrices* forms[3] = {&F.D, &F.R, &F.N};
    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> pos, mixed;
    for (int k = 0; k < samples; ++k) pos.push_back(random_vector(rng, mesh.nodes(), 0.0, 1.0));
    for (int k = 0; k < samples; ++k) mixed.push_back(random_vector(rng, mesh.nodes(), -1.0, 1.0));
    const double allowance = 10.0 * std::pow(mesh.h(), std::min(1.0, 2.0 - 2.0 * kernel.s));
    r.set("truncation_allowance", allowance);

    for (const FormMatrices* fm : forms) {
        const std::string name = to_string(fm->flavor);
        const SpectralSemigroup sg = eigendecompose(*fm);
        for (double t : t_grid) {
            double neg = 0.0, grow = -std::numeric_limits<double>::infinity();
            for (size_t k = 0; k < pos.size(); ++k) {
                for (const Eigen::VectorXd* f : {&pos[k], &mixed[k]}) {
                    const Eigen::VectorXd fa = fm->restrict_nodes(*f);
                    const double fn = f->cwiseAbs().maxCoeff();
                    const Eigen::VectorXd Tf = sg.apply(fa, t);
                    if (f == &pos[k]) neg = std::max(neg, -Tf.minCoeff() / fn);
                    grow = std::max(grow, Tf.cwiseAbs().maxCoeff() / fn - 1.0);
                }
            }
            r.add(name + " t=" + fmt_short(t) + " positivity: max(-T f) / |f|_inf", neg, 1e-6);
            r.add(name + " t=" + fmt_short(t) + " contraction: |T f|_inf / |f|_inf - 1", grow, 1e-6);
        }
        // truncation: a(u ^ 1, u ^ 1) <= a(u, u) + allowance * a(u, u)
        double worst = -std::numeric_limits<double>::infinity();
        std::mt19937_64 rng_u(seed + 17);
        for (int k = 0; k < samples; ++k) {
            const Eigen::VectorXd u = random_vector(rng_u, fm->size(), 0.0, 2.0);
            const Eigen::VectorXd uc = u.cwiseMin(1.0);
            const double au = u.dot(fm->stiffness * u), ac = uc.dot(fm->stiffness * uc);
            worst = std::max(worst, (ac - au) / au);
        }
        {
            // smooth profile crossing 1 on both sides
            const Eigen::VectorXd x = fm->restrict_nodes(mesh.coordinates());
            const double c = 0.5 * (mesh.a + mesh.b), hl = 0.5 * (mesh.b - mesh.a);
            const Eigen::VectorXd u = 1.5 * (1.0 - ((x.array() - c) / hl).square()).matrix();
            const Eigen::VectorXd uc = u.cwiseMin(1.0);
            const double au = u.dot(fm->stiffness * u), ac = uc.dot(fm->stiffness * uc);
            worst = std::max(worst, (ac - au) / au);
        }
        r.add(name + " truncation: max (a(u^1) - a(u)) / a(u)", worst, allowance);
    }

    const SpectralSemigroup N = eigendecompose(F.N);
    const SpectralSemigroup D = eigendecompose(F.D);
    Eigen::VectorXd hat = Eigen::VectorXd::Zero(mesh.nodes());
    hat[mesh.N / 2] = 1.0;
    for (double t : t_grid) {
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(F.N.size());
        r.add("neumann t=" + fmt_short(t) + " |T_N 1 - 1|_inf", (N.apply(one, t) - one).cwiseAbs().maxCoeff(), 1e-8);
        const double dh = D.apply(F.D.restrict_nodes(hat), t).cwiseAbs().maxCoeff();
        r.add("dirichlet t=" + fmt_short(t) + " |T_D hat|_inf - |hat|_inf", dh - 1.0, -1e-12);
    }

    // consistent mass: h-dependent undershoot, recorded only
    const SpectralSemigroup Dc = eigendecompose(F.D, -1, MassKind::consistent);
    double neg = 0.0;
    std::vector<Eigen::VectorXd> cpos = pos;
    cpos.push_back(hat);
    std::vector<double> ct = t_grid;
    ct.push_back(0.01 * std::pow(mesh.h(), 2.0 * kernel.s));
    for (const Eigen::VectorXd& f : cpos)
        for (double t : ct) neg = std::max(neg, -Dc.apply(F.D.restrict_nodes(f), t).minCoeff());
    r.record("dirichlet consistent-mass positivity undershoot (recorded)", neg);
    r.notes.push_back("sampled property: " + std::to_string(samples) + " random f per flavor and t");
    return r;
}

VerificationReport check_neumann_structure(const Mesh& mesh, const FractionalKernel& kernel,
                                           const IntervalDomain& domain, const std::vector<double>& t_grid) {
    VerificationReport r;
    r.suite = "neumann_structure";
    r.set("s", kernel.s);
    r.set("N", static_cast<double>(mesh.N));
    const FormMatrices F = assemble_neumann(mesh, kernel, domain);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F.stiffness);
    if (es.info() != Eigen::Success) throw NonConvergence("neumann structure: eigen solver failed");
    r.add("|lambda_1(K_N)| / |K_N|", std::abs(es.eigenvalues()[0]) / F.norm(), 1e-8);
    Eigen::VectorXd v = es.eigenvectors().col(0);
    v /= v.cwiseAbs().maxCoeff();
    const double mean = v.mean();
    r.add("lowest eigenvector deviation from constant", (v.array() - mean).abs().maxCoeff() / std::abs(mean), 1e-8);
    r.add("|K_N 1|_inf / |K_N|", (F.stiffness * Eigen::VectorXd::Ones(F.size())).cwiseAbs().maxCoeff() / F.norm(),
          1e-10);
    const SpectralSemigroup sg = eigendecompose(F);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(F.size());
    for (double t : t_grid)
        r.add("t=" + fmt_short(t) + " |T_N(t) 1 - 1|_inf", (sg.apply(one, t) - one).cwiseAbs().maxCoeff(), 1e-10);
    return r;
}

TimeWindow ultracontractive_window(const Mesh& mesh, double s) {
    const double lo = 16.0 * mesh.h(), hi = (mesh.b - mesh.a) / 8.0;
    if (!(hi > lo)) throw ValidationError("ultracontractivity window is empty: refine the mesh");
    return {std::pow(lo, 2.0 * s), std::pow(hi, 2.0 * s)};
}

double fitted_loglog_slope(const SpectralSemigroup& sg, const TimeWindow& w, int samples) {
    if (samples < 2 || !(w.t_max > w.t_min) || !(w.t_min > 0.0)) throw ValidationError("invalid fit window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const double lt = std::log(w.t_min) + (std::log(w.t_max) - std::log(w.t_min)) * i / (samples - 1);
        const double ly = std::log(heat_kernel_sup(sg, std::exp(lt)));
        sx += lt;
        sy += ly;
        sxx += lt * lt;
        sxy += lt * ly;
    }
    return (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
}

VerificationReport check_ultracontractivity(const std::vector<SpectralSemigroup>& sgs, double s,
                                            const TimeWindow& window) {
    VerificationReport r;
    r.suite = "ultracontractivity";
    r.set("s", s);
    r.set("t_min", window.t_min);
    r.set("t_max", window.t_max);
    if (!sgs.empty()) r.set("mass", sgs.front().mass_kind == MassKind::lumped ? "lumped" : "consistent");
    const double target = -1.0 / (2.0 * s);
    r.record("target slope -n/(2s)", target);
    std::vector<double> slopes(sgs.size());
    for (size_t i = 0; i < sgs.size(); ++i) {
        const SpectralSemigroup& sg = sgs[i];
        const std::string name = to_string(sg.flavor) + " N=" + std::to_string(sg.mesh.N);
        slopes[i] = fitted_loglog_slope(sg, window);
        r.record(name + " fitted slope", slopes[i]);
        r.add(name + " |slope - target| / |target|", std::abs(slopes[i] - target) / std::abs(target), 0.2);
        double incr = -std::numeric_limits<double>::infinity();
        double prev = heat_kernel_sup(sg, window.t_min);
        for (int k = 1; k <= 12; ++k) {
            const double t = window.t_min * std::pow(window.t_max / window.t_min, k / 12.0);
            const double cur = heat_kernel_sup(sg, t);
            incr = std::max(incr, (cur - prev) / prev);
            prev = cur;
        }
        r.add(name + " sup nonincreasing in t: max relative increase", incr, 1e-12);
        if (sg.flavor == Flavor::neumann) {
            const double vol = sg.mesh.b - sg.mesh.a;
            const double big = heat_kernel_sup(sg, 1e3 * window.t_max);
            r.add(name + " no decay at large t: (1/|Omega| - sup) * |Omega|", (1.0 / vol - big) * vol, 1e-8);
        }
    }
    for (size_t i = 0; i < sgs.size(); ++i)
        for (size_t j = 0; j < sgs.size(); ++j)
            if (sgs[j].flavor == sgs[i].flavor && sgs[j].mesh.N == 2 * sgs[i].mesh.N)
                r.add(to_string(sgs[i].flavor) + " |slope(N=" + std::to_string(sgs[i].mesh.N) + ") - slope(2N)|",
                      std::abs(slopes[i] - slopes[j]), 0.1);
    return r;
}

VerificationReport check_extension_minimality(const Mesh& mesh, const FractionalKernel& kernel,
                                              const IntervalDomain& domain, const ExteriorWeight& beta,
                                              std::uint64_t seed, int fields, const QuadratureConfig& quad) {
    VerificationReport r;
    r.suite = "extension_minimality";
    snapshot(r, mesh, kernel, seed);
    r.set("beta", beta.label());
    std::mt19937_64 rng(seed);
    const Field u(mesh, random_vector(rng, mesh.nodes(), -1.0, 1.0));
    const double L = domain.length();
    const double T = domain.exterior_truncation;
    const double C = kernel.c_ns;

    struct Bump {
        int side;
        double center, radius, amp;
    };
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Bump> bumps;
    for (int k = 0; k < fields; ++k) {
        Bump b;
        b.side = U(rng) < 0.5 ? 0 : 1;
        b.radius = (0.02 + 0.3 * U(rng)) * std::min(T, L);
        const double lo = 1e-3 * L + b.radius, hi = std::max(lo, T - b.radius);
        b.center = lo + (hi - lo) * U(rng);
        b.amp = 2.0 * U(rng) - 1.0;
        bumps.push_back(b);
    }

    for (Flavor fl : {Flavor::neumann, Flavor::robin}) {
        const ExteriorWeight bw = fl == Flavor::robin ? beta : ExteriorWeight::zero();
        const ExtendedField w = extend(u, fl, kernel, domain, bw);
        const std::string name = to_string(fl);
        double energy = extended_energy(w, kernel, domain, quad);
        if (fl == Flavor::robin && !bw.is_zero()) {
            const double eps0 = 1e-10 * L;
            for (int side = 0; side < 2; ++side) {
                auto g = [&](double e) {
                    const double eps = eps0 + e;
                    const double y = side == 0 ? domain.b + eps : domain.a - eps;
                    const double v = w.exterior(y);
                    return bw.at_distance(eps) * v * v;
                };
                energy += integrate_half_line(g, L, bw.breakpoints(), quad);
            }
        }
        r.record(name + " energy at the extension", energy);

        std::vector<double> delta(bumps.size()), predicted(bumps.size());
        parallel_for(static_cast<int>(bumps.size()), [&](int k) {
            const Bump& b = bumps[k];
            const SmoothFunction g = compact_bump(b.amp, b.center, b.radius);
            auto y_of = [&](double eps) { return b.side == 0 ? domain.b + eps : domain.a - eps; };
            // energy change: int 2 g (N^s w + beta w) + (C rho + beta) g^2
            auto dens = [&](double eps) {
                const double y = y_of(eps);
                const double gv = g(eps);
                const double ns = nonlocal_normal_derivative(w, kernel, domain, y, quad);
                const double bt = bw.at_distance(eps);
                return 2.0 * gv * (ns + bt * w.exterior(y)) + (C * rho(domain, kernel, y) + bt) * gv * gv;
            };
            auto pred = [&](double eps) {
                const double gv = g(eps);
                return (C * rho(domain, kernel, y_of(eps)) + bw.at_distance(eps)) * gv * gv;
            };
            std::vector<double> cuts{b.center - b.radius};
            for (double bp : bw.breakpoints())
                if (bp > cuts.back() && bp < b.center + b.radius) cuts.push_back(bp);
            cuts.push_back(b.center + b.radius);
            double d = 0.0, p = 0.0;
            for (size_t i = 0; i + 1 < cuts.size(); ++i) {
                d += integrate_adaptive(dens, cuts[i], cuts[i + 1], quad);
                p += integrate_adaptive(pred, cuts[i], cuts[i + 1], quad);
            }
            delta[k] = d;
            predicted[k] = p;
        });
        double worst = std::numeric_limits<double>::infinity(), mismatch = 0.0;
        for (size_t k = 0; k < bumps.size(); ++k) {
            worst = std::min(worst, delta[k]);
            mismatch = std::max(mismatch, std::abs(delta[k] - predicted[k]) / predicted[k]);
        }
        const double scale = std::max(std::abs(energy), 1e-300);
        r.add(name + " max energy decrease / energy", -worst / scale, 1e-6);
        r.add(name + " |change - int (C rho + beta) g^2| / int (C rho + beta) g^2", mismatch, 1e-6);
    }
    r.notes.push_back("sampled property: " + std::to_string(fields) + " random exterior bump perturbations");
    return r;
}

VerificationReport check_mu_counterexample(const Mesh& mesh, const FractionalKernel& kernel,
                                           const IntervalDomain& domain, const ExteriorWeight& beta,
                                           std::uint64_t seed) {
    VerificationReport r;
    r.suite = "mu_counterexample";
    snapshot(r, mesh, kernel, seed);
    r.set("beta", beta.label());

    const FormMatrices KR = assemble_robin(mesh, kernel, domain, beta);
    const FormMatrices KmR = assemble_mu(mesh, kernel, domain, robin_equivalent_density(beta, kernel, domain));
    r.add("max |K_mu(Robin density) - K_R| / max(1, |K_R|)",
          (KmR.stiffness - KR.stiffness).cwiseAbs().maxCoeff() / std::max(1.0, KR.norm()), 1e-10);

    const FormMatrices KN = assemble_neumann(mesh, kernel, domain);
    const FormMatrices Km0 = assemble_mu(mesh, kernel, domain, ExteriorWeight::zero());
    r.add("max |K_mu(0) - K_N| / max(1, |K_N|)",
          (Km0.stiffness - KN.stiffness).cwiseAbs().maxCoeff() / std::max(1.0, KN.norm()), 1e-12);

    const FormMatrices KD = assemble_dirichlet(mesh, kernel, domain);
    const FormMatrices Km2 = assemble_mu(mesh, kernel, domain, rho_density(2.0, kernel, domain), {}, DofSet::interior);
    const Eigen::MatrixXd Diff = Km2.stiffness - KD.stiffness;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(KD.stiffness);
    double best = -std::numeric_limits<double>::infinity();
    auto consider = [&](const Eigen::VectorXd& x) {
        best = std::max(best, x.dot(Diff * x) / x.dot(KD.stiffness * x));
    };
    for (int k = 0; k < KD.size(); ++k) consider(es.eigenvectors().col(k));
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 50; ++k) consider(random_vector(rng, KD.size(), -1.0, 1.0));
    r.record("best x'(K_mu - K_D)x / x'K_D x with w = 2 C rho", best);
    r.add("violation of K_mu <= K_D with w = 2 C rho: -(best margin)", -best, -1e-6);

    double diverged = 0.0;
    try {
        assemble_mu(mesh, kernel, domain, rho_density(2.0, kernel, domain), {}, DofSet::all);
    } catch (const DivergenceError&) {
        diverged = 1.0;
    }
    r.record("w = 2 C rho diverges with endpoint DOFs (1 = yes)", diverged);
    return r;
}

VerificationReport check_getoor(double s, const std::vector<int>& meshes, double min_order, double max_error) {
    VerificationReport r;
    r.suite = "getoor";
    r.set("s", s);
    r.set("min_order", min_order);
    const IntervalDomain d(-1.0, 1.0);
    const FractionalKernel k(s);
    const double c = gamma_fn(0.5) / (std::pow(4.0, s) * gamma_fn(1.0 + s) * gamma_fn(0.5 + s));
    std::vector<double> errs;
    for (int N : meshes) {
        const Mesh m(d, N);
        const Field u = solve_elliptic(assemble_dirichlet(m, k, d), Field::interpolate(m, [](double) { return 1.0; }));
        double err = 0.0;
        for (int i = 0; i < m.nodes(); ++i) {
            const double x = m.node(i);
            err = std::max(err, std::abs(u.coeffs[i] - c * std::pow(std::max(0.0, 1.0 - x * x), s)));
        }
        errs.push_back(err);
        r.record("max nodal error N=" + std::to_string(N), err);
    }
    for (size_t i = 1; i < errs.size(); ++i)
        r.add("error ratio e(N=" + std::to_string(meshes[i]) + ") / e(N=" + std::to_string(meshes[i - 1]) + ")",
              errs[i] / errs[i - 1], std::pow(static_cast<double>(meshes[i - 1]) / meshes[i], min_order));
    if (!errs.empty()) r.add("max nodal error at the finest mesh", errs.back(), max_error);
    return r;
}

VerificationReport check_exterior_conditions(const Mesh& mesh, const FractionalKernel& kernel,
                                             const IntervalDomain& domain, const ExteriorWeight& beta,
                                             std::uint64_t seed, int points, const QuadratureConfig& quad) {
    VerificationReport r;
    r.suite = "exterior_conditions";
    snapshot(r, mesh, kernel, seed);
    r.set("beta", beta.label());
    QuadratureConfig q = quad;
    q.rel_tol = std::min(q.rel_tol, 1e-11);
    std::mt19937_64 rng(seed);
    const Field u(mesh, random_vector(rng, mesh.nodes(), -1.0, 1.0));
    const double unorm = u.coeffs.cwiseAbs().maxCoeff();
    const double L = domain.length();
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> ys;
    for (int k = 0; k < points; ++k) {
        const double eps = 1e-3 * L * std::pow(domain.exterior_truncation / (1e-3 * L), U(rng));
        ys.push_back(U(rng) < 0.5 ? domain.b + eps : domain.a - eps);
    }
    const ExtendedField wN = extend(u, Flavor::neumann, kernel, domain);
    const ExtendedField wR = extend(u, Flavor::robin, kernel, domain, beta);
    std::vector<double> resN(points), resR(points);
    parallel_for(points, [&](int k) {
        const double y = ys[k];
        const double scale = kernel.c_ns * rho(domain, kernel, y) * unorm;
        resN[k] = std::abs(nonlocal_normal_derivative(wN, kernel, domain, y, q)) / scale;
        resR[k] = std::abs(nonlocal_normal_derivative(wR, kernel, domain, y, q) + beta(domain, y) * wR.exterior(y)) /
                  scale;
    });
    r.add("max |N^s u_N| / (C rho |u|_inf)", *std::max_element(resN.begin(), resN.end()), 1e-8);
    r.add("max |N^s u_R + beta u_R| / (C rho |u|_inf)", *std::max_element(resR.begin(), resR.end()), 1e-8);
    r.notes.push_back("sampled property: " + std::to_string(points) + " random exterior points");
    return r;
}

}  // namespace fraclap
