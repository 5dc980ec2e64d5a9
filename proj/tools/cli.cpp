#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "fent/entropy.hpp"
#include "fent/errors.hpp"
#include "fent/finite_size.hpp"
#include "fent/matrix_checks.hpp"
#include "fent/plot.hpp"
#include "fent/quadrature.hpp"
#include "fent/region.hpp"
#include "fent/report.hpp"
#include "fent/thermo.hpp"
#include "fent/widom.hpp"

namespace fent::cli {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Context {
    RunConfig cfg;
    std::filesystem::path dir;
    std::ostream& out;

    std::filesystem::path file(const std::string& fallback, const std::string& ext) const {
        return dir / ((cfg.name.empty() ? fallback : cfg.name) + ext);
    }
};

TraceOptions trace_options(const RunConfig& cfg) {
    TraceOptions o;
    o.route = cfg.route == "cartesian" ? Route::cartesian : cfg.route == "polar" ? Route::polar : Route::automatic;
    o.spacing = cfg.spacing;
    o.quad = cfg.quad;
    return o;
}

// 𝓑 for c t² from the half-space Hilbert–Schmidt value, which is exactly
// linear in α^{d-1}.
CoefficientResult hs_referenced(const Symbol& a, const Region& region, const EntropyFunction& f, const QuadratureSpec& q) {
    const auto c = f.quadratic_coefficient();
    if (!c) throw std::invalid_argument("method hs needs f = c t²");
    std::vector<double> e(a.dimension(), 0.0);
    e[0] = 1.0;
    const double per_area = *c * hs_oracle_quadratic(a, Region::half_space(e), 1.0, q);
    const double area = region.shape() == Shape::half_space ? 1.0 : region.boundary_measure();
    CoefficientResult r;
    r.value = *c == 0.0 ? 0.0 : per_area * area;
    r.error_estimate = 1e-4 * std::fabs(r.value);
    r.method = Method::hs_oracle;
    r.symbol_tag = a.tag();
    r.region_tag = region.tag();
    r.f_tag = f.tag();
    return r;
}

int cmd_coeff(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Symbol a = parse_symbol(cfg.symbol, cfg.d);
    const Region region = parse_region(cfg.region, cfg.d);
    const EntropyFunction f = parse_entropy_function(cfg.f);
    const bool all = cfg.method == "all";
    std::vector<CoefficientResult> results;
    nlohmann::json skipped = nlohmann::json::array();
    auto attempt = [&](const std::string& m, auto&& compute) {
        if (!all && cfg.method != m) return;
        try {
            results.push_back(compute());
        } catch (const std::invalid_argument& e) {
            if (!all) throw;
            skipped.push_back({{"method", m}, {"reason", e.what()}});
        }
    };
    attempt("pv", [&] { return b_coefficient(a, region, f, cfg.quad); });
    attempt("parseval", [&] {
        const auto c = f.quadratic_coefficient();
        if (!c) throw std::invalid_argument("method parseval needs f = c t²");
        return b_parseval_quadratic(a, region, *c, cfg.quad);
    });
    attempt("hs", [&] { return hs_referenced(a, region, f, cfg.quad); });
    attempt("closed", [&] {
        if (f.kind() != EntropyKind::effective || f.gamma() <= 2.0 || a.kind() != SymbolKind::gaussian)
            throw std::invalid_argument("method closed needs the Gaussian symbol and f = effective:γ with γ > 2");
        const double area = region.shape() == Shape::half_space ? 1.0 : region.boundary_measure();
        return b_closed_form_gaussian(f.gamma(), cfg.d, area);
    });
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results) j.push_back(r.to_json());
    write_json(ctx.file("coeff", ".json"), {{"results", j}, {"skipped", skipped}});
    ctx.out << "coeff";
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        ctx.out << ' ' << to_string(results[i].method) << '=' << num(results[i].value);
        lo = i ? std::min(lo, results[i].value) : results[i].value;
        hi = i ? std::max(hi, results[i].value) : results[i].value;
    }
    if (results.size() > 1) ctx.out << " spread=" << num(hi == lo ? 0.0 : (hi - lo) / std::max(std::fabs(hi), std::fabs(lo)));
    ctx.out << '\n';
    return kOk;
}

int cmd_sigma(Context& ctx) {
    const CoefficientResult r = sigma_series(ctx.cfg.d, ctx.cfg.tol);
    write_json(ctx.file("sigma", ".json"), r.to_json());
    ctx.out << "Sigma(" << ctx.cfg.d << ") = " << num(r.value) << " +- " << num(r.error_estimate) << '\n';
    return kOk;
}

int cmd_density(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Hamiltonian h = parse_hamiltonian(cfg.hamiltonian, cfg.d);
    nlohmann::json rows = nlohmann::json::array();
    for (double T : cfg.temperatures) {
        nlohmann::json row{{"T", T}, {"mu", cfg.mu}, {"rho", particle_density(h, T, cfg.mu, cfg.quad)},
                           {"integrated_dos", integrated_dos(h, T)}};
        nlohmann::json s = nlohmann::json::object();
        for (double g : cfg.gammas) s[num(g)] = entropy_density(h, T, cfg.mu, g, cfg.quad);
        row["entropy_density"] = s;
        rows.push_back(row);
    }
    write_json(ctx.file("density", ".json"), {{"h", h.tag()}, {"rows", rows}});
    const auto& r0 = rows.front();
    ctx.out << "density T=" << num(r0["T"].get<double>()) << " rho=" << num(r0["rho"].get<double>())
            << " N=" << num(r0["integrated_dos"].get<double>()) << '\n';
    return kOk;
}

int cmd_solve_mu(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Hamiltonian h = parse_hamiltonian(cfg.hamiltonian, cfg.d);
    nlohmann::json rows = nlohmann::json::array();
    for (double T : cfg.temperatures) {
        const MuSolution s = solve_mu(h, T, cfg.rho, cfg.tol * cfg.rho, cfg.quad);
        rows.push_back({{"T", T}, {"rho", cfg.rho}, {"mu", s.mu}, {"density", s.density}, {"residual", s.residual},
                        {"lambda_T", s.lambda}, {"diagnostic", s.diagnostic}});
    }
    write_json(ctx.file("solve_mu", ".json"), {{"h", h.tag()}, {"rows", rows}});
    ctx.out << "solve-mu";
    for (const auto& r : rows) ctx.out << " T=" << num(r["T"].get<double>()) << ":mu=" << num(r["mu"].get<double>());
    ctx.out << '\n';
    return kOk;
}

void write_scan(Context& ctx, const ScalingReport& rep, const std::string& fallback) {
    write_text(ctx.file(fallback, ".csv"), rep.csv());
    write_json(ctx.file(fallback, ".json"), rep.to_json());
    emit_plot(rep, ctx.file(fallback, ".svg"));
}

int cmd_scan_finite(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    ScanSpec s;
    s.mode = ScanMode::fixed_symbol;
    s.symbol = parse_symbol(cfg.symbol, cfg.d);
    s.f = parse_entropy_function(cfg.f);
    s.region = parse_region(cfg.region, cfg.d);
    s.alphas = cfg.alphas;
    s.trace = trace_options(cfg);
    s.quad = cfg.quad;
    const ScalingReport rep = scaling_scan(s);
    write_scan(ctx, rep, "scan_finite");
    const auto& last = rep.rows.back();
    ctx.out << "scan-finite rows=" << rep.rows.size() << " last_normalized=" << num(last.normalized)
            << " target=" << num(last.target) << " deviation=" << num(last.deviation) << '\n';
    return kOk;
}

int cmd_scan_temp(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    ScanSpec s;
    s.mode = parse_scan_mode(cfg.mode);
    if (s.mode == ScanMode::fixed_symbol) throw std::invalid_argument("scan-temp: mode must be fixed_mu or fixed_rho");
    s.h = parse_hamiltonian(cfg.hamiltonian, cfg.d);
    s.gammas = cfg.gammas;
    s.region = parse_region(cfg.region, cfg.d);
    s.alphas = cfg.alphas;
    s.temperatures = cfg.temperatures;
    s.mu = cfg.mu;
    s.rho = cfg.rho;
    s.trace = trace_options(cfg);
    s.quad = cfg.quad;
    const ScalingReport rep = scaling_scan(s);
    write_scan(ctx, rep, "scan_temp");
    ctx.out << "scan-temp mode=" << to_string(rep.mode) << " rows=" << rep.rows.size();
    for (double g : cfg.gammas) {
        const auto rows = rep.for_gamma(g);
        ctx.out << " gamma=" << num(g) << ":deviation=" << num(rows.back().deviation);
        std::vector<double> T, y;
        for (const auto& r : rows) {
            T.push_back(r.T);
            y.push_back(r.raw_trace);
        }
        bool distinct = false;
        for (double t : T) distinct = distinct || t != T.front();
        if (distinct) ctx.out << ",slope=" << num(loglog_slope(T, y));
    }
    ctx.out << '\n';
    return kOk;
}

int cmd_ee(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Symbol a = parse_symbol(cfg.symbol, cfg.d);
    const Region region = parse_region(cfg.region, cfg.d);
    const double alpha = cfg.alphas.front(), gamma = cfg.gammas.front();
    const EeEstimate e = ee_estimate(a, region, alpha, gamma, cfg.spacing, cfg.margin, trace_options(cfg));
    write_json(ctx.file("ee", ".json"), {{"symbol", a.tag()},
                                         {"region", region.tag()},
                                         {"alpha", alpha},
                                         {"gamma", gamma},
                                         {"value", e.value},
                                         {"region_part", e.region_part},
                                         {"complement_part", e.complement_part},
                                         {"margin", e.margin},
                                         {"doubled_value", e.doubled_value},
                                         {"stability", e.stability},
                                         {"route", e.route}});
    ctx.out << "ee H=" << num(e.value) << " H/alpha^(d-1)=" << num(e.value / std::pow(alpha, cfg.d - 1))
            << " stability=" << num(e.stability) << " route=" << e.route << '\n';
    return kOk;
}

int cmd_checks(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    RandomEnsembleSpec spec;
    spec.n = cfg.n;
    spec.trials = cfg.trials;
    spec.seed = cfg.seed;
    nlohmann::json reports = nlohmann::json::array();
    bool ok = true;
    for (double g : cfg.gammas) {
        if (g <= 1.0) {
            const CheckReport r = davis_check(g, spec);
            ok = ok && r.passed();
            reports.push_back(r.to_json());
        }
        if (g <= 2.0) {
            const CheckReport r = berezin_check(g, spec);
            ok = ok && r.passed();
            reports.push_back(r.to_json());
        }
        const MidpointResult m = midpoint_concavity_search(g, cfg.budget, cfg.seed);
        // Operator concavity holds for γ ≤ 1 and fails beyond.
        ok = ok && (m.found == (g > 1.0));
        reports.push_back(m.to_json(g));
        if (g > 1.0) {
            std::vector<double> grid;
            for (int k = 0; k <= 400; ++k) grid.push_back(0.05 * k);
            reports.push_back({{"check", "branch_point"}, {"gamma", g}, {"y0", branch_point_probe(g, grid)},
                               {"expected", std::tan(std::numbers::pi / (2 * g))}});
        }
        reports.push_back({{"check", "concavity_classify"},
                           {"gamma", g},
                           {"result", concavity_classify(g, 2001) == Concavity::concave ? "concave" : "neither"}});
    }
    write_json(ctx.file("checks", ".json"), {{"reports", reports}, {"passed", ok}});
    ctx.out << "checks " << (ok ? "passed" : "FAILED") << " reports=" << reports.size() << '\n';
    return ok ? kOk : kNumericalError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rényi entanglement entropy of the free Fermi gas: coefficients and finite-size checks"};
    app.require_subcommand(1);
    std::string config_path;
    std::map<std::string, std::string> values;
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"coeff", "boundary coefficient B by pv quadrature, Parseval, HS oracle or closed form"},
        {"sigma", "the alternating double series Sigma(d)"},
        {"density", "particle density, entropy density and integrated DOS"},
        {"solve-mu", "chemical potential at fixed density"},
        {"scan-finite", "finite-size traces against B for a fixed symbol"},
        {"scan-temp", "fixed-mu or fixed-rho temperature scans"},
        {"ee", "entanglement entropy estimate H_gamma"},
        {"checks", "random-matrix operator inequality checks"}};
    std::vector<CLI::App*> apps;
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "key = value configuration file");
        for (const auto& key : config_keys()) sub->add_option("--" + key, values[key]);
        apps.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    CLI::App* sub = nullptr;
    for (auto* s : apps)
        if (s->parsed()) sub = s;

    RunConfig cfg;
    cfg.subcommand = sub->get_name();
    if (cfg.subcommand == "checks") cfg.gammas = {0.5, 1.0, 1.5, 2.0, 3.0};
    std::map<std::string, std::string> given;
    for (const auto& key : config_keys())
        if (sub->count("--" + key) > 0) given[key] = values[key];
    try {
        if (!config_path.empty()) cfg.apply(read_config_file(config_path));
        cfg.apply(given);  // flags override the file
        cfg.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    set_thread_count(cfg.threads);

    Context ctx{cfg, output_directory(cfg.output_dir), out};
    try {
        write_json(ctx.file(cfg.subcommand, ".config.json"), cfg.to_json());
        if (cfg.subcommand == "coeff") return cmd_coeff(ctx);
        if (cfg.subcommand == "sigma") return cmd_sigma(ctx);
        if (cfg.subcommand == "density") return cmd_density(ctx);
        if (cfg.subcommand == "solve-mu") return cmd_solve_mu(ctx);
        if (cfg.subcommand == "scan-finite") return cmd_scan_finite(ctx);
        if (cfg.subcommand == "scan-temp") return cmd_scan_temp(ctx);
        if (cfg.subcommand == "ee") return cmd_ee(ctx);
        return cmd_checks(ctx);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << " (residual " << num(e.residual()) << ")";
        if (!e.history().empty()) {
            err << " history:";
            for (double h : e.history()) err << ' ' << num(h);
        }
        err << '\n';
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::out_of_range& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
}

}  // namespace fent::cli
