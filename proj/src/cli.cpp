#include "fraclap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "fraclap/errors.hpp"

namespace fraclap {

namespace {

std::filesystem::path prepare_out(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ValidationError("cannot create output directory '" + cfg.out_dir + "'");
    return dir;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ValidationError("cannot write '" + p.string() + "'");
    return os;
}

void csv_header(std::ostream& os, const std::string& command, const RunConfig& cfg) {
    os << "# fraclap " << build_describe() << "\n";
    os << "# command = " << command << "\n";
    for (const auto& [k, v] : cfg.snapshot()) os << "# " << k << " = " << v << "\n";
}

nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : cfg.snapshot()) j[k] = v;
    return j;
}

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    auto os = open_out(p);
    os << j.dump(2) << "\n";
}

FormMatrices assemble(Flavor flavor, const RunConfig& cfg, const Mesh& mesh) {
    const IntervalDomain d = cfg.domain();
    const FractionalKernel k = cfg.kernel();
    switch (flavor) {
        case Flavor::dirichlet: return assemble_dirichlet(mesh, k, d, cfg.quad);
        case Flavor::neumann: return assemble_neumann(mesh, k, d, cfg.quad);
        case Flavor::robin: return assemble_robin(mesh, k, d, make_weight(cfg.beta), cfg.quad);
        case Flavor::mu: return assemble_mu(mesh, k, d, mu_density(cfg), cfg.quad, cfg.mu.dofs);
    }
    throw ValidationError("unknown flavor");
}

// int of the P1 interpolant
double integral(const Field& f) {
    const double h = f.mesh.h();
    double acc = 0.0;
    for (int i = 0; i < f.mesh.nodes(); ++i) acc += (i == 0 || i == f.mesh.N ? 0.5 : 1.0) * h * f.coeffs[i];
    return acc;
}

void check_compatibility(const Field& f) {
    const double total = integral(f);
    const double scale = integral(Field(f.mesh, f.coeffs.cwiseAbs()));
    if (std::abs(total) > 1e-10 * scale + 1e-300)
        throw ValidationError("Neumann problem requires int_Omega f dx = 0 (compatibility); got " +
                              format_double(total) + " (set [problem] remove_mean = true to project)");
}

SmoothFunction bump(const RunConfig& cfg, double shift, double width) {
    const double m = 0.5 * (cfg.a + cfg.b), L = cfg.b - cfg.a;
    return gaussian_bump(1.0, m + shift * L, width * L);
}

}  // namespace

void cmd_solve(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Mesh mesh = cfg.mesh();
    const Field f = make_datum(cfg.rhs, mesh, cfg.s, cfg.seed);
    if (cfg.flavor == Flavor::neumann) check_compatibility(f);
    const auto dir = prepare_out(cfg);

    const FormMatrices forms = assemble(cfg.flavor, cfg, mesh);
    const Field u = solve_elliptic(forms, f);
    const Eigen::VectorXd ua = forms.restrict_nodes(u.coeffs);
    const Eigen::VectorXd fa = forms.restrict_nodes(f.coeffs);
    const double energy = ua.dot(forms.stiffness * ua);
    const double residual = (forms.stiffness * ua - forms.mass * fa).cwiseAbs().maxCoeff();

    auto os = open_out(dir / "solution.csv");
    csv_header(os, "solve", cfg);
    os << "region,x,u\n";
    const IntervalDomain d = cfg.domain();
    std::vector<std::pair<double, double>> left, right;
    if (cfg.flavor != Flavor::mu && cfg.exterior_samples > 0) {
        const ExtendedField w = extend(u, cfg.flavor, cfg.kernel(), d, make_weight(cfg.beta));
        for (int k = cfg.exterior_samples; k >= 1; --k) {
            const double dist = cfg.truncation * k / cfg.exterior_samples;
            left.emplace_back(d.a - dist, w.exterior(d.a - dist));
        }
        for (int k = 1; k <= cfg.exterior_samples; ++k) {
            const double dist = cfg.truncation * k / cfg.exterior_samples;
            right.emplace_back(d.b + dist, w.exterior(d.b + dist));
        }
    }
    for (const auto& [x, v] : left) os << "exterior," << format_double(x) << "," << format_double(v) << "\n";
    for (int i = 0; i < mesh.nodes(); ++i)
        os << "interior," << format_double(mesh.node(i)) << "," << format_double(u.coeffs[i]) << "\n";
    for (const auto& [x, v] : right) os << "exterior," << format_double(x) << "," << format_double(v) << "\n";

    nlohmann::json j;
    j["command"] = "solve";
    j["git_describe"] = build_describe();
    j["config"] = config_json(cfg);
    j["energy"] = energy;
    j["residual_max"] = residual;
    log << "energy = " << format_double(energy) << "\n";
    log << "residual_max = " << format_double(residual) << "\n";
    if (cfg.flavor == Flavor::dirichlet && cfg.rhs.kind == "constant" && !cfg.rhs.remove_mean) {
        // closed-form solution for constant data: value * c_s (r^2 - (x - m)^2)^s
        const double s = cfg.s, r = 0.5 * (cfg.b - cfg.a), m = 0.5 * (cfg.a + cfg.b);
        const double c = gamma_fn(0.5) / (std::pow(4.0, s) * gamma_fn(1.0 + s) * gamma_fn(0.5 + s));
        double err = 0.0;
        for (int i = 0; i < mesh.nodes(); ++i) {
            const double x = mesh.node(i);
            const double ref = cfg.rhs.value * c * std::pow(std::max(0.0, r * r - (x - m) * (x - m)), s);
            err = std::max(err, std::abs(u.coeffs[i] - ref));
        }
        j["closed_form_max_error"] = err;
        log << "closed_form_max_error = " << format_double(err) << "\n";
    }
    write_json(dir / "solve.json", j);
}

void cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Mesh mesh = cfg.mesh();
    std::vector<Flavor> flavors = cfg.spectrum_flavors;
    if (flavors.empty()) flavors.push_back(cfg.flavor);
    std::vector<Eigen::VectorXd> lambdas;
    for (Flavor fl : flavors) {
        const FormMatrices forms = assemble(fl, cfg, mesh);
        if (cfg.spectrum_count > forms.size())
            throw ValidationError("[spectrum] count exceeds the " + std::to_string(forms.size()) + " " + to_string(fl) +
                                  " degrees of freedom");
        lambdas.push_back(eigendecompose(forms, cfg.spectrum_count, cfg.mass).eigenvalues);
    }
    const auto dir = prepare_out(cfg);
    auto os = open_out(dir / "spectrum.csv");
    csv_header(os, "spectrum", cfg);
    os << "k";
    for (Flavor fl : flavors) os << ",lambda_" << to_string(fl);
    os << "\n";
    Eigen::Index rows = 0;
    for (const auto& l : lambdas) rows = std::max(rows, l.size());
    for (Eigen::Index k = 0; k < rows; ++k) {
        os << k + 1;
        for (const auto& l : lambdas) {
            os << ",";
            if (k < l.size()) os << format_double(l[k]);
        }
        os << "\n";
    }
    for (size_t i = 0; i < flavors.size(); ++i)
        log << "lambda_1(" << to_string(flavors[i]) << ") = " << format_double(lambdas[i][0]) << "\n";
}

void cmd_evolve(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Mesh mesh = cfg.mesh();
    const Field f = make_datum(cfg.rhs, mesh, cfg.s, cfg.seed);
    const FormMatrices forms = assemble(cfg.flavor, cfg, mesh);
    const SpectralSemigroup sg = eigendecompose(forms, -1, cfg.mass);
    const auto dir = prepare_out(cfg);
    auto os = open_out(dir / "evolve.csv");
    csv_header(os, "evolve", cfg);
    os << "t,x,u\n";
    auto ns = open_out(dir / "norms.csv");
    csv_header(ns, "evolve", cfg);
    ns << "t,mass,sup\n";
    for (double t : cfg.times) {
        const Field u = evolve(sg, f, t);
        for (int i = 0; i < mesh.nodes(); ++i)
            os << format_double(t) << "," << format_double(mesh.node(i)) << "," << format_double(u.coeffs[i]) << "\n";
        const double mass = integral(u), sup = u.coeffs.cwiseAbs().maxCoeff();
        ns << format_double(t) << "," << format_double(mass) << "," << format_double(sup) << "\n";
        log << "t = " << format_double(t) << " mass = " << format_double(mass) << " sup = " << format_double(sup)
            << "\n";
    }
}

std::vector<std::string> selected_suites(const RunConfig& cfg) {
    static const std::vector<std::string> order{"exterior",   "getoor",    "divergence",  "integration_by_parts",
                                                "s_to_one",   "ordering",  "domination",  "submarkov",
                                                "neumann",    "ultracontractivity", "minimality", "mu"};
    if (cfg.verify.suites.empty()) return order;
    std::vector<std::string> out;
    for (const auto& name : order)
        for (const auto& want : cfg.verify.suites)
            if (want == name) {
                out.push_back(name);
                break;
            }
    return out;
}

VerificationReport run_suite(const std::string& name, const RunConfig& cfg) {
    const Mesh mesh = cfg.mesh();
    const FractionalKernel k = cfg.kernel();
    const IntervalDomain d = cfg.domain();
    const ExteriorWeight beta = make_weight(cfg.beta);
    const VerifySpec& v = cfg.verify;
    if (name == "exterior") return check_exterior_conditions(mesh, k, d, beta, cfg.seed, v.points, cfg.quad);
    if (name == "getoor") return check_getoor(cfg.s, v.getoor_meshes, v.getoor_min_order);
    if (name == "divergence") return check_divergence_theorem(bump(cfg, 0.1, 0.2), k, d, cfg.quad);
    if (name == "integration_by_parts")
        return check_integration_by_parts(bump(cfg, 0.1, 0.2), bump(cfg, -0.05, 0.25), k, d, cfg.quad);
    if (name == "s_to_one") return check_s_to_one_limit(bump(cfg, 0.1, 0.3), bump(cfg, -0.05, 0.4), d, v.limit_s, cfg.quad);
    if (name == "ordering") return check_form_ordering(mesh, k, d, beta, cfg.seed, v.ordering_samples);
    if (name == "domination") return check_domination(mesh, k, d, beta, v.t_grid, cfg.seed, v.samples);
    if (name == "submarkov") return check_submarkov(mesh, k, d, beta, v.t_grid, cfg.seed, v.samples);
    if (name == "neumann") return check_neumann_structure(mesh, k, d, v.t_grid);
    if (name == "ultracontractivity") {
        const Mesh fine(d, 2 * cfg.N);
        auto sg = [&](const FormMatrices& f) { return eigendecompose(f, -1, MassKind::consistent); };
        std::vector<SpectralSemigroup> sgs{sg(assemble_dirichlet(mesh, k, d, cfg.quad)),
                                           sg(assemble_robin(mesh, k, d, beta, cfg.quad)),
                                           sg(assemble_neumann(mesh, k, d, cfg.quad)),
                                           sg(assemble_dirichlet(fine, k, d, cfg.quad)),
                                           sg(assemble_robin(fine, k, d, beta, cfg.quad))};
        return check_ultracontractivity(sgs, cfg.s, ultracontractive_window(mesh, cfg.s));
    }
    if (name == "minimality") return check_extension_minimality(mesh, k, d, beta, cfg.seed, v.fields, cfg.quad);
    if (name == "mu") return check_mu_counterexample(mesh, k, d, beta, cfg.seed);
    throw ValidationError("unknown suite '" + name + "'");
}

bool cmd_verify(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto suites = selected_suites(cfg);
    if (std::find(suites.begin(), suites.end(), "ultracontractivity") != suites.end())
        ultracontractive_window(cfg.mesh(), cfg.s);  // throws early when the mesh is too coarse
    const auto dir = prepare_out(cfg);
    nlohmann::json j;
    j["command"] = "verify";
    j["git_describe"] = build_describe();
    j["config"] = config_json(cfg);
    nlohmann::json reports = nlohmann::json::array();
    bool all = true;
    for (const auto& name : suites) {
        const VerificationReport r = run_suite(name, cfg);
        log << r.to_text();
        reports.push_back(r.to_json());
        all = all && r.passed();
    }
    j["reports"] = reports;
    j["passed"] = all;
    write_json(dir / "verify.json", j);
    log << (all ? "ALL PASS" : "SOME CHECKS FAILED") << "\n";
    return all;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    try {
        if (command == "solve") {
            cmd_solve(cfg, log);
        } else if (command == "spectrum") {
            cmd_spectrum(cfg, log);
        } else if (command == "evolve") {
            cmd_evolve(cfg, log);
        } else if (command == "verify") {
            return cmd_verify(cfg, log) ? kExitOk : kExitFailedChecks;
        } else {
            err << "error: unknown command '" << command << "'\n";
            return kExitValidation;
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace fraclap
