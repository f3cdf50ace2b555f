#include "fraclap/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fraclap/errors.hpp"

namespace fraclap {

namespace pt = boost::property_tree;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

const std::map<std::string, std::set<std::string>>& grammar() {
    static const std::map<std::string, std::set<std::string>> g{
        {"domain", {"a", "b", "truncation"}},
        {"kernel", {"s"}},
        {"mesh", {"N"}},
        {"problem", {"flavor", "rhs", "value", "amplitude", "center", "width", "radius", "values", "remove_mean",
                     "exterior_samples"}},
        {"beta", {"kind", "c", "d_min", "d_max", "p", "dist", "values"}},
        {"mu", {"density", "factor", "dofs", "kind", "c", "d_min", "d_max", "p", "dist", "values"}},
        {"time", {"t"}},
        {"spectrum", {"count", "mass", "flavors"}},
        {"quadrature", {"rel_tol", "gauss_order", "max_depth", "pv_inner_radius"}},
        {"run", {"seed", "out"}},
        {"verify", {"suites", "samples", "ordering_samples", "fields", "points", "t_grid", "limit_s", "getoor_meshes",
                    "getoor_min_order"}},
    };
    return g;
}

const std::set<std::string>& suite_names() {
    static const std::set<std::string> names{"divergence", "integration_by_parts", "s_to_one", "ordering",
                                             "domination", "submarkov", "neumann", "ultracontractivity",
                                             "minimality", "mu", "getoor", "exterior"};
    return names;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Reader {
    const pt::ptree& tree;

    const std::string* raw(const std::string& sec, const std::string& key) const {
        auto s = tree.find(sec);
        if (s == tree.not_found()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.not_found()) return nullptr;
        return &k->second.data();
    }
    static std::string where(const std::string& sec, const std::string& key) { return "[" + sec + "] " + key; }

    static double to_double(const std::string& text, const std::string& what) {
        const std::string t = trim(text);
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(t.c_str(), &end);
        if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
            throw ValidationError(what + ": expected a finite number, got '" + text + "'");
        return v;
    }
    static long long to_int(const std::string& text, const std::string& what) {
        const std::string t = trim(text);
        char* end = nullptr;
        errno = 0;
        const long long v = std::strtoll(t.c_str(), &end, 10);
        if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
            throw ValidationError(what + ": expected an integer, got '" + text + "'");
        return v;
    }

    void num(const std::string& sec, const std::string& key, double& out) const {
        if (auto r = raw(sec, key)) out = to_double(*r, where(sec, key));
    }
    void integer(const std::string& sec, const std::string& key, int& out) const {
        if (auto r = raw(sec, key)) {
            const long long v = to_int(*r, where(sec, key));
            if (v < -(1LL << 30) || v > (1LL << 30)) throw ValidationError(where(sec, key) + ": out of range");
            out = static_cast<int>(v);
        }
    }
    void word(const std::string& sec, const std::string& key, std::string& out) const {
        if (auto r = raw(sec, key)) out = trim(*r);
    }
    void flag(const std::string& sec, const std::string& key, bool& out) const {
        if (auto r = raw(sec, key)) {
            const std::string v = trim(*r);
            if (v == "true")
                out = true;
            else if (v == "false")
                out = false;
            else
                throw ValidationError(where(sec, key) + ": expected true or false, got '" + v + "'");
        }
    }
    std::vector<std::string> items(const std::string& text) const {
        std::vector<std::string> out;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(trim(item));
        if (out.size() == 1 && out[0].empty()) out.clear();
        return out;
    }
    void list(const std::string& sec, const std::string& key, std::vector<double>& out) const {
        if (auto r = raw(sec, key)) {
            out.clear();
            for (const auto& it : items(*r)) out.push_back(to_double(it, where(sec, key)));
        }
    }
    void int_list(const std::string& sec, const std::string& key, std::vector<int>& out) const {
        if (auto r = raw(sec, key)) {
            out.clear();
            for (const auto& it : items(*r)) {
                const long long v = to_int(it, where(sec, key));
                if (v < 0 || v > (1LL << 30)) throw ValidationError(where(sec, key) + ": out of range");
                out.push_back(static_cast<int>(v));
            }
        }
    }
    void word_list(const std::string& sec, const std::string& key, std::vector<std::string>& out) const {
        if (auto r = raw(sec, key)) out = items(*r);
    }
};

void read_weight(const Reader& r, const std::string& sec, WeightSpec& w) {
    r.word(sec, "kind", w.kind);
    r.num(sec, "c", w.c);
    r.num(sec, "d_min", w.d_min);
    r.num(sec, "d_max", w.d_max);
    r.num(sec, "p", w.p);
    r.list(sec, "dist", w.dist);
    r.list(sec, "values", w.values);
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

void weight_snapshot(std::vector<std::pair<std::string, std::string>>& out, const std::string& sec,
                     const WeightSpec& w) {
    out.emplace_back(sec + ".kind", w.kind);
    out.emplace_back(sec + ".c", format_double(w.c));
    out.emplace_back(sec + ".d_min", format_double(w.d_min));
    out.emplace_back(sec + ".d_max", format_double(w.d_max));
    out.emplace_back(sec + ".p", format_double(w.p));
    out.emplace_back(sec + ".dist", join(w.dist));
    out.emplace_back(sec + ".values", join(w.values));
}

std::string mass_name(MassKind m) { return m == MassKind::lumped ? "lumped" : "consistent"; }

}  // namespace

ExteriorWeight make_weight(const WeightSpec& w) {
    if (w.kind == "zero") return ExteriorWeight::zero();
    if (w.kind == "constant_window") return ExteriorWeight::constant_window(w.c, w.d_min, w.d_max);
    if (w.kind == "algebraic_decay") return ExteriorWeight::algebraic_decay(w.c, w.p);
    if (w.kind == "tabulated") return ExteriorWeight::tabulated(w.dist, w.values);
    throw ValidationError("unknown weight kind '" + w.kind + "' (expected zero|constant_window|algebraic_decay|tabulated)");
}

ExteriorWeight mu_density(const RunConfig& cfg) {
    if (cfg.mu.density == "robin") return robin_equivalent_density(make_weight(cfg.beta), cfg.kernel(), cfg.domain());
    if (cfg.mu.density == "rho") return rho_density(cfg.mu.factor, cfg.kernel(), cfg.domain());
    if (cfg.mu.density == "weight") return make_weight(cfg.mu.weight);
    throw ValidationError("[mu] density: expected robin|rho|weight, got '" + cfg.mu.density + "'");
}

Field make_datum(const DatumSpec& d, const Mesh& mesh, double s, std::uint64_t seed) {
    Field f;
    if (d.kind == "constant") {
        f = Field::interpolate(mesh, [&](double) { return d.value; });
    } else if (d.kind == "hat") {
        f = Field::interpolate(mesh, [&](double x) { return d.amplitude * std::max(0.0, 1.0 - std::abs(x - d.center) / d.width); });
    } else if (d.kind == "gaussian") {
        const SmoothFunction g = gaussian_bump(d.amplitude, d.center, d.width);
        f = Field::interpolate(mesh, [&](double x) { return g(x); });
    } else if (d.kind == "getoor") {
        const double r = d.radius > 0.0 ? d.radius : 0.5 * (mesh.b - mesh.a);
        const SmoothFunction g = getoor_profile(d.center, r, s);
        f = Field::interpolate(mesh, [&](double x) { return d.amplitude * g(x); });
    } else if (d.kind == "random") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, d.amplitude);
        Eigen::VectorXd c(mesh.nodes());
        for (int i = 0; i < mesh.nodes(); ++i) c[i] = U(rng);
        f = Field(mesh, c);
    } else if (d.kind == "tabulated") {
        if (static_cast<int>(d.values.size()) != mesh.nodes())
            throw ValidationError("[problem] values: need N+1 = " + std::to_string(mesh.nodes()) + " nodal values, got " +
                                  std::to_string(d.values.size()));
        f = Field(mesh, Eigen::Map<const Eigen::VectorXd>(d.values.data(), d.values.size()));
    } else {
        throw ValidationError("[problem] rhs: unknown datum '" + d.kind +
                              "' (expected constant|hat|gaussian|getoor|random|tabulated)");
    }
    if (d.remove_mean) {
        // trapezoid weights integrate the P1 interpolant exactly
        const double h = mesh.h();
        double total = 0.0;
        for (int i = 0; i < mesh.nodes(); ++i) total += (i == 0 || i == mesh.N ? 0.5 : 1.0) * h * f.coeffs[i];
        f.coeffs.array() -= total / (mesh.b - mesh.a);
    }
    return f;
}

void RunConfig::validate() const {
    if (!(a < b)) throw ValidationError("[domain] need a < b");
    if (!(truncation > 0.0)) throw ValidationError("[domain] truncation must be > 0");
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("[kernel] s must lie in (0,1), got " + format_double(s));
    if (N < 4) throw ValidationError("[mesh] N must be >= 4, got " + std::to_string(N));
    if (N > 4096) throw ValidationError("[mesh] N must be <= 4096 (dense assembly), got " + std::to_string(N));
    make_weight(beta);
    if (beta.kind != "zero" && !(beta.c >= 0.0)) throw ValidationError("[beta] c must be >= 0");
    if (flavor == Flavor::mu) {
        if (mu.density == "rho" && !(mu.factor >= 0.0)) throw ValidationError("[mu] factor must be >= 0");
        if (mu.density == "weight") make_weight(mu.weight);
        if (mu.density != "robin" && mu.density != "rho" && mu.density != "weight")
            throw ValidationError("[mu] density: expected robin|rho|weight, got '" + mu.density + "'");
    }
    if ((rhs.kind == "hat" || rhs.kind == "gaussian") && !(rhs.width > 0.0))
        throw ValidationError("[problem] width must be > 0");
    if (rhs.kind == "random" && !(rhs.amplitude >= 0.0))
        throw ValidationError("[problem] amplitude must be >= 0 for the random datum");
    make_datum(rhs, mesh(), s, seed);
    if (exterior_samples < 0) throw ValidationError("[problem] exterior_samples must be >= 0");
    double prev = 0.0;
    for (double t : times) {
        if (t < prev) throw ValidationError("[time] t must be nonnegative and nondecreasing");
        prev = t;
    }
    if (times.empty()) throw ValidationError("[time] t must list at least one time");
    if (spectrum_count == 0 || spectrum_count < -1) throw ValidationError("[spectrum] count must be -1 (all) or >= 1");
    try {
        quad.validate();
    } catch (const Error& e) {
        throw ValidationError(std::string("[quadrature] ") + e.what());
    }
    for (const auto& name : verify.suites)
        if (!suite_names().count(name)) throw ValidationError("[verify] suites: unknown suite '" + name + "'");
    if (verify.samples < 1 || verify.ordering_samples < 1 || verify.fields < 1 || verify.points < 1)
        throw ValidationError("[verify] sample counts must be >= 1");
    for (double t : verify.t_grid)
        if (!(t > 0.0)) throw ValidationError("[verify] t_grid entries must be > 0");
    for (double v : verify.limit_s)
        if (!(v > 0.0 && v < 1.0)) throw ValidationError("[verify] limit_s entries must lie in (0,1)");
    for (int m : verify.getoor_meshes)
        if (m < 4 || m > 4096) throw ValidationError("[verify] getoor_meshes entries must lie in [4, 4096]");
}

std::vector<std::pair<std::string, std::string>> RunConfig::snapshot() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("domain.a", format_double(a));
    out.emplace_back("domain.b", format_double(b));
    out.emplace_back("domain.truncation", format_double(truncation));
    out.emplace_back("kernel.s", format_double(s));
    out.emplace_back("mesh.N", std::to_string(N));
    out.emplace_back("problem.flavor", to_string(flavor));
    out.emplace_back("problem.rhs", rhs.kind);
    out.emplace_back("problem.value", format_double(rhs.value));
    out.emplace_back("problem.amplitude", format_double(rhs.amplitude));
    out.emplace_back("problem.center", format_double(rhs.center));
    out.emplace_back("problem.width", format_double(rhs.width));
    out.emplace_back("problem.radius", format_double(rhs.radius));
    out.emplace_back("problem.values", join(rhs.values));
    out.emplace_back("problem.remove_mean", rhs.remove_mean ? "true" : "false");
    out.emplace_back("problem.exterior_samples", std::to_string(exterior_samples));
    weight_snapshot(out, "beta", beta);
    out.emplace_back("mu.density", mu.density);
    out.emplace_back("mu.factor", format_double(mu.factor));
    out.emplace_back("mu.dofs", mu.dofs == DofSet::all ? "all" : "interior");
    weight_snapshot(out, "mu", mu.weight);
    out.emplace_back("time.t", join(times));
    out.emplace_back("spectrum.count", std::to_string(spectrum_count));
    out.emplace_back("spectrum.mass", mass_name(mass));
    std::vector<std::string> fl;
    for (Flavor f : spectrum_flavors) fl.push_back(to_string(f));
    out.emplace_back("spectrum.flavors", join(fl));
    out.emplace_back("quadrature.rel_tol", format_double(quad.rel_tol));
    out.emplace_back("quadrature.gauss_order", std::to_string(quad.gauss_order));
    out.emplace_back("quadrature.max_depth", std::to_string(quad.max_depth));
    out.emplace_back("quadrature.pv_inner_radius", format_double(quad.pv_inner_radius));
    out.emplace_back("run.seed", std::to_string(seed));
    out.emplace_back("verify.suites", join(verify.suites));
    out.emplace_back("verify.samples", std::to_string(verify.samples));
    out.emplace_back("verify.ordering_samples", std::to_string(verify.ordering_samples));
    out.emplace_back("verify.fields", std::to_string(verify.fields));
    out.emplace_back("verify.points", std::to_string(verify.points));
    out.emplace_back("verify.t_grid", join(verify.t_grid));
    out.emplace_back("verify.limit_s", join(verify.limit_s));
    out.emplace_back("verify.getoor_meshes", join(verify.getoor_meshes));
    out.emplace_back("verify.getoor_min_order", format_double(verify.getoor_min_order));
    std::sort(out.begin(), out.end());
    return out;
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    for (const auto& [sec, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ValidationError("config: key '" + sec + "' outside any section");
        auto g = grammar().find(sec);
        if (g == grammar().end()) throw ValidationError("config: unknown section [" + sec + "]");
        for (const auto& [key, val] : body)
            if (!g->second.count(key)) throw ValidationError("config: unknown key '" + key + "' in [" + sec + "]");
    }

    RunConfig c;
    const Reader r{tree};
    r.num("domain", "a", c.a);
    r.num("domain", "b", c.b);
    r.num("domain", "truncation", c.truncation);
    r.num("kernel", "s", c.s);
    r.integer("mesh", "N", c.N);

    std::string flavor;
    r.word("problem", "flavor", flavor);
    if (!flavor.empty()) c.flavor = flavor_from_string(flavor);
    r.word("problem", "rhs", c.rhs.kind);
    r.num("problem", "value", c.rhs.value);
    r.num("problem", "amplitude", c.rhs.amplitude);
    r.num("problem", "center", c.rhs.center);
    r.num("problem", "width", c.rhs.width);
    r.num("problem", "radius", c.rhs.radius);
    r.list("problem", "values", c.rhs.values);
    r.flag("problem", "remove_mean", c.rhs.remove_mean);
    r.integer("problem", "exterior_samples", c.exterior_samples);

    read_weight(r, "beta", c.beta);
    r.word("mu", "density", c.mu.density);
    r.num("mu", "factor", c.mu.factor);
    std::string dofs;
    r.word("mu", "dofs", dofs);
    if (dofs == "interior")
        c.mu.dofs = DofSet::interior;
    else if (!dofs.empty() && dofs != "all")
        throw ValidationError("[mu] dofs: expected all|interior, got '" + dofs + "'");
    read_weight(r, "mu", c.mu.weight);

    r.list("time", "t", c.times);
    r.integer("spectrum", "count", c.spectrum_count);
    std::string mass;
    r.word("spectrum", "mass", mass);
    if (mass == "consistent")
        c.mass = MassKind::consistent;
    else if (!mass.empty() && mass != "lumped")
        throw ValidationError("[spectrum] mass: expected lumped|consistent, got '" + mass + "'");
    std::vector<std::string> fl;
    r.word_list("spectrum", "flavors", fl);
    for (const auto& f : fl) c.spectrum_flavors.push_back(flavor_from_string(f));

    r.num("quadrature", "rel_tol", c.quad.rel_tol);
    r.integer("quadrature", "gauss_order", c.quad.gauss_order);
    r.integer("quadrature", "max_depth", c.quad.max_depth);
    r.num("quadrature", "pv_inner_radius", c.quad.pv_inner_radius);

    if (auto raw = r.raw("run", "seed")) {
        const std::string t = trim(*raw);
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
        if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE)
            throw ValidationError("[run] seed: expected an unsigned 64-bit integer, got '" + t + "'");
        c.seed = v;
    }
    r.word("run", "out", c.out_dir);

    r.word_list("verify", "suites", c.verify.suites);
    if (c.verify.suites.size() == 1 && c.verify.suites[0] == "all") c.verify.suites.clear();
    r.integer("verify", "samples", c.verify.samples);
    r.integer("verify", "ordering_samples", c.verify.ordering_samples);
    r.integer("verify", "fields", c.verify.fields);
    r.integer("verify", "points", c.verify.points);
    r.list("verify", "t_grid", c.verify.t_grid);
    r.list("verify", "limit_s", c.verify.limit_s);
    r.int_list("verify", "getoor_meshes", c.verify.getoor_meshes);
    r.num("verify", "getoor_min_order", c.verify.getoor_min_order);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

}  // namespace fraclap
