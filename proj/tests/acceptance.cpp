// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fent/entropy.hpp"
#include "fent/finite_size.hpp"
#include "fent/matrix_checks.hpp"
#include "fent/region.hpp"
#include "fent/thermo.hpp"
#include "fent/widom.hpp"

using namespace fent;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.ok) ++failures;
    std::printf("%s criterion %d (%.1f s):%s\n", o.ok ? "PASS" : "FAIL", id, secs, o.detail.str().c_str());
    std::fflush(stdout);
}

double timed(const std::function<double()>& f, double& secs) {
    const auto t0 = std::chrono::steady_clock::now();
    const double v = f();
    secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

}  // namespace

int main() {
    criterion(1, [](Outcome& o) {
        const double want[] = {0.19798, 0.15419};
        for (int d : {2, 3}) {
            double secs = 0.0;
            const double v = timed([&] { return sigma_series(d, 1e-8).value; }, secs);
            o.detail << " Sigma(" << d << ")=" << v << " in " << secs << "s";
            o.require(std::fabs(v - want[d - 2]) <= 2e-4, "Sigma value");
            o.require(secs < 5.0, "Sigma runtime");
        }
    });

    criterion(2, [](Outcome& o) {
        const auto g = Symbol::gaussian(2);
        const auto hp = Region::half_space({0.0, 1.0});
        const auto t2 = EntropyFunction::quadratic();
        const double pv = b_coefficient(g, hp, t2).value;
        const double pars = b_parseval_quadratic(g, hp, 1.0).value;
        const double hs = -1.0 / (8.0 * std::pow(kPi, 1.5));
        o.detail << " pv=" << pv << " parseval=" << pars << " hs=" << hs;
        o.require(rel(pv, pars) <= 0.005 && rel(pv, hs) <= 0.005 && rel(pars, hs) <= 0.005, "pairwise 0.5%");
        // The closed form is for η_γ^eff = γ/(2(γ-1)) t², γ > 2.
        const double gamma = 3.0;
        const double implied = b_closed_form_gaussian(gamma, 2, 1.0).value * 2.0 * (gamma - 1.0) / gamma;
        o.detail << " ratio_to_closed_form=" << pv / implied;
    });

    criterion(3, [](Outcome& o) {
        const auto g = Symbol::gaussian(2);
        const auto disk = Region::ball(2, 1.0);
        const double target = b_coefficient(g, disk, EntropyFunction::quadratic()).value;
        double prev = INFINITY;
        for (double alpha : {8.0, 16.0, 32.0}) {
            const double dev = rel(hs_oracle_quadratic(g, disk, alpha) / alpha, target);
            o.detail << " dev(" << alpha << ")=" << dev;
            o.require(dev < prev, "decreasing deviation");
            prev = dev;
        }
        o.require(prev <= 0.05, "final deviation <= 5%");
    });

    criterion(4, [](Outcome& o) {
        const auto g = Symbol::gaussian(2);
        const auto disk = Region::ball(2, 1.0);
        TraceOptions opts;
        opts.route = Route::cartesian;
        opts.spacing = 1.0 / 32;
        const TraceD t = trace_d_many(g, disk, 8.0, {EntropyFunction::quadratic()}, opts)[0];
        const double hs = hs_oracle_quadratic(g, disk, 8.0);
        o.detail << " trace_d=" << t.value << " hs=" << hs << " nodes=" << t.nodes << " rel=" << rel(t.value, hs);
        o.require(t.route == "cartesian", "dense eigen route");
        o.require(rel(t.value, hs) <= 0.01, "within 1%");
    });

    criterion(5, [](Outcome& o) {
        ScanSpec s;
        s.mode = ScanMode::fixed_mu;
        s.h = Hamiltonian::quadratic(2);
        s.gammas = {1.0};
        s.alphas = {8.0, 12.0, 16.0};
        s.temperatures = {4.0, 9.0, 16.0};
        const ScalingReport rep = scaling_scan(s);
        double prev = INFINITY;
        for (const auto& r : rep.rows) {
            o.detail << " (" << r.alpha << "," << r.T << "):" << r.normalized << "/" << r.target << " dev=" << r.deviation;
            o.require(r.deviation < prev, "decreasing deviation");
            prev = r.deviation;
        }
        o.require(prev <= 0.10, "final deviation <= 10%");
    });

    criterion(6, [](Outcome& o) {
        ScanSpec s;
        s.mode = ScanMode::fixed_rho;
        s.h = Hamiltonian::quadratic(2);
        s.gammas = {0.5, 1.0, 3.0};
        s.alphas = {12.0};
        s.temperatures = {4.0, 16.0, 64.0};
        const ScalingReport rep = scaling_scan(s);
        for (double gamma : s.gammas) {
            std::vector<double> T, y;
            bool sign_ok = true;
            for (const auto& r : rep.for_gamma(gamma)) {
                T.push_back(r.T);
                y.push_back(r.raw_trace);
                sign_ok = sign_ok && (gamma <= 2.0 ? r.normalized > 0.0 : r.normalized < 0.0);
            }
            const double slope = loglog_slope(T, y), predicted = 0.5 - table1(gamma).delta;
            o.detail << " gamma=" << gamma << ":slope=" << slope << "(predicted " << predicted << ")";
            o.require(std::fabs(slope - predicted) <= 0.15, "slope for gamma " + std::to_string(gamma));
            o.require(sign_ok, "sign for gamma " + std::to_string(gamma));
        }
    });

    criterion(7, [](Outcome& o) {
        struct Op {
            Symbol a;
            Region r;
            double alpha;
        };
        const auto h = Hamiltonian::quadratic(2);
        const std::vector<Symbol> symbols = {Symbol::gaussian(2), Symbol::fermi(h, 1.0, 0.0), Symbol::limit_fermi(h),
                                             Symbol::boltzmann(h), Symbol::model(h, 0.5, 1.0, 2.0),
                                             Symbol::fermi(Hamiltonian::quartic(2), 1.0, 0.5),
                                             Symbol::fermi(Hamiltonian::perturbed_quadratic(2), 1.0, 0.0)};
        const std::vector<Region> regions = {Region::ball(2, 1.0), Region::axis_box({-0.5, -0.5}, {0.5, 0.5}),
                                             Region::annulus(2, 0.5, 1.0)};
        std::vector<Op> ops;
        for (const auto& a : symbols)
            for (const auto& r : regions) ops.push_back({a, r, 4.0});
        ops.push_back({Symbol::gaussian(3), Region::ball(3, 1.0), 3.0});
        ops.push_back({Symbol::fermi(Hamiltonian::quadratic(3), 1.0, 0.0), Region::ball(3, 1.0), 3.0});

        std::vector<EntropyFunction> fs;
        for (double gamma : {0.5, 1.0, 1.5, 2.0}) fs.push_back(EntropyFunction::renyi(gamma));
        TraceOptions opts;
        opts.spacing = 1.0 / 16;
        double worst_pos = INFINITY, worst_berezin = INFINITY;
        for (const auto& op : ops) {
            const auto ts = trace_d_many(op.a, op.r, op.alpha, fs, opts);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                if (i < 2) worst_pos = std::min(worst_pos, ts[i].value);
                // Discrete Berezin: tr η(W) against the consistent volume term.
                const double m = (ts[i].trace_term - ts[i].volume_term) / std::max(1.0, std::fabs(ts[i].volume_term));
                worst_berezin = std::min(worst_berezin, m);
            }
        }
        o.detail << " operators=" << ops.size() << " min_trace_d=" << worst_pos << " min_berezin=" << worst_berezin;
        o.require(worst_pos >= -1e-6, "(a) positivity");
        o.require(worst_berezin >= -1e-9, "(b) discrete Berezin");

        RandomEnsembleSpec spec;
        double worst = INFINITY;
        for (double gamma : {0.5, 1.0}) worst = std::min(worst, davis_check(gamma, spec).worst_margin);
        for (double gamma : {0.5, 1.0, 1.5, 2.0}) worst = std::min(worst, berezin_check(gamma, spec).worst_margin);
        o.detail << " random_worst=" << worst;
        o.require(worst >= -1e-9, "(c) random Davis/Berezin");

        for (double gamma : {0.5, 1.0, 1.5, 2.0, 3.0}) {
            const MidpointResult m = midpoint_concavity_search(gamma, 100000);
            o.detail << " midpoint(" << gamma << ")=" << (m.found ? "counterexample" : "none") << "@" << m.trials;
            o.require(m.found == (gamma > 1.0), "(d) midpoint search at gamma " + std::to_string(gamma));
        }
    });

    criterion(8, [](Outcome& o) {
        double worst = 0.0;
        for (double gamma : {0.5, 1.0, 1.5, 2.0, 3.0, 7.0}) worst = std::max(worst, std::fabs(eta(gamma, 0.5) - std::log(2.0)));
        o.detail << " eta(1/2) err=" << worst;
        o.require(worst <= 1e-12, "eta(1/2) = ln 2");
        worst = 0.0;
        for (double gamma : {0.5, 1.0, 2.0, 3.0})
            worst = std::max(worst, std::fabs(second_derivative_eta(gamma, 0.5) + 4.0 * gamma));
        o.detail << " eta''(1/2) err=" << worst;
        o.require(worst <= 1e-8, "eta''(1/2) = -4 gamma");

        QuadratureSpec q;
        const double u2 = u_value(EntropyFunction::quadratic(), 0.3, 0.1, q);
        o.detail << " U(0.3,0.1;t^2)=" << u2;
        o.require(std::fabs(u2 + 0.04) <= 1e-8, "U(0.3, 0.1; t^2) = -0.04");
        const double ul = u_value(EntropyFunction::log(), std::exp(-1.0), std::exp(-2.0), q);
        o.detail << " U(e^-1,e^-2;ln)=" << ul;
        o.require(std::fabs(ul + 0.5) <= 1e-8, "U(e^-1, e^-2; ln) = -1/2");

        // ϱ = (T/2π) ln(1 + e^{μ/T}) for h = |ξ|²/2 in d = 2.
        const double mu_err = std::fabs(solve_mu(Hamiltonian::quadratic(2), 1.0, std::log(2.0) / (2 * kPi), 1e-12).mu);
        const double mu2 = solve_mu(Hamiltonian::quadratic(2), 2.0, std::log1p(std::exp(0.75)) / kPi, 1e-12).mu;
        o.detail << " solve_mu err=" << mu_err << "," << std::fabs(mu2 - 1.5);
        o.require(mu_err <= 1e-9 && std::fabs(mu2 - 1.5) <= 1e-9, "solve_mu inversion");

        std::vector<double> grid;
        for (int k = 0; k <= 400; ++k) grid.push_back(0.01 * k);
        const double y0 = branch_point_probe(2.0, grid);
        o.detail << " y0(2)=" << y0;
        o.require(std::fabs(y0 - 1.0) <= 1e-8, "branch point y0 = 1");
    });

    criterion(9, [](Outcome& o) {
        const auto h = Hamiltonian::quadratic(2);
        const std::vector<Region> regions = {Region::ball(2, 1.0), Region::axis_box({-0.5, -1.0}, {0.5, 1.0})};
        double worst = 0.0;
        for (const auto& a : {Symbol::gaussian(2), Symbol::fermi(h, 1.0, 0.0)})
            for (const auto& r : regions)
                for (const auto& f : {EntropyFunction::renyi(1.0), EntropyFunction::renyi(3.0)}) {
                    const auto in = b_coefficient(a, r, f), out = b_coefficient(a, r.complement(), f);
                    const double tol = 2.0 * (in.error_estimate + out.error_estimate) + 1e-10 * std::fabs(in.value);
                    o.require(std::fabs(in.value - out.value) <= tol, "complement symmetry on " + r.tag());
                    worst = std::max(worst, rel(in.value, out.value));
                }
        o.detail << " complement_rel=" << worst;

        const double aff = b_coefficient(Symbol::gaussian(2), regions[0], EntropyFunction::affine(2.0, 1.0)).value;
        o.detail << " affine=" << aff;
        o.require(aff == 0.0, "affine f gives exactly 0");

        const std::vector<double> ts{1e-2, 1e-3, 1e-4, 1e-5};
        for (double gamma : {0.5, 1.0, 1.5, 2.0, 3.0})
            for (int k = 0; k <= 2; ++k) {
                const auto seq = remainder_limit_scan(gamma, k, ts);
                bool dec = true;
                for (std::size_t i = 1; i < seq.size(); ++i) dec = dec && std::fabs(seq[i]) < std::fabs(seq[i - 1]);
                o.require(dec && std::fabs(seq.back()) < 0.1, "remainder scan gamma " + std::to_string(gamma));
            }
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
