#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fent/errors.hpp"
#include "fent/finite_size.hpp"
#include "fent/plot.hpp"
#include "fent/widom.hpp"

using namespace fent;

namespace {

const double kPi = std::acos(-1.0);

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// -α/(8π^{3/2}): Gaussian half-plane, per unit length, worked by hand.
double gaussian_halfplane(double alpha) { return -alpha / (8 * std::pow(kPi, 1.5)); }

}  // namespace

TEST_CASE("bessel blocks match the standard library") {
    // j_ℓ(x) = √(π/2x) J_{ℓ+1/2}(x); std::sph_bessel gives up at high order.
    auto close = [](double v, double ref) { return std::fabs(v - ref) <= 1e-9 * std::fabs(ref) + 1e-13; };
    for (double x : {1e-3, 0.7, 5.0, 42.5, 310.0}) {
        for (int l0 : {0, 32, 160, 320}) {
            std::vector<double> j(32);
            bessel_block(2, x, l0, l0 + 32, j.data());
            for (int l = l0; l < l0 + 32; ++l) CHECK(close(j[l - l0], std::cyl_bessel_j(l, x)));
            bessel_block(3, x, l0, l0 + 32, j.data());
            for (int l = l0; l < l0 + 32; ++l)
                CHECK(close(j[l - l0], std::sqrt(kPi / (2 * x)) * std::cyl_bessel_j(l + 0.5, x)));
        }
    }
    std::vector<double> j(4);
    CHECK_THROWS_AS(bessel_block(4, 1.0, 0, 4, j.data()), std::invalid_argument);
}

TEST_CASE("build_w structure") {
    const auto g = Symbol::gaussian(2);
    const auto disk = Region::ball(2, 1.0);
    const auto W = build_w(g, disk, 4.0, 1.0 / 16);
    const std::size_t N = W.size();
    CHECK(std::fabs(static_cast<double>(N) - kPi * 256) < 0.02 * kPi * 256);
    double tr = 0.0, asym = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        tr += W(i, i);
        for (std::size_t j = 0; j < i; ++j) asym = std::max(asym, std::fabs(W(i, j) - W(j, i)));
    }
    CHECK(asym <= 1e-12);
    // Diagonal: α² ǎ(0) h² with ǎ(0) = 1/(2π).
    CHECK(W(0, 0) == doctest::Approx(16.0 / (2 * kPi) / 256).epsilon(1e-10));
    // Riemann-sum trace: α² ǎ(0) |Λ| = 16 · (2π)^{-1} · π = 8.
    CHECK(tr == doctest::Approx(8.0).epsilon(0.02));
    const auto ev = eigenvalues(W);
    CHECK(ev.front() >= -1e-3);
    CHECK(ev.back() <= 1.0 + 1e-3);

    const auto zero = Symbol::custom_radial(2, [](double) { return 0.0; }, "zero");
    const auto Z = build_w(zero, disk, 4.0, 1.0 / 8);
    for (double v : Z.matrix) CHECK(v == 0.0);

    CHECK_THROWS_AS(build_w(g, disk, 4.0, 1.0 / 64, 1000), std::invalid_argument);
    CHECK_THROWS_AS(build_w(g, Region::half_space({1.0, 0.0}), 4.0, 0.1), std::invalid_argument);
    CHECK(spacing_rule(8.0, disk) == doctest::Approx(1.0 / 32));
    CHECK(spacing_rule(1.0, Region::annulus(2, 0.5, 0.6)) == doctest::Approx(0.1 / 8));
}

TEST_CASE("trace_f_of_w spectral identities") {
    const auto g = Symbol::gaussian(2);
    const auto box = Region::axis_box({-0.5, -0.5}, {0.5, 0.5});
    const auto W = build_w(g, box, 4.0, 1.0 / 16);
    double tr = 0.0, fro = 0.0;
    for (std::size_t i = 0; i < W.size(); ++i) tr += W(i, i);
    for (double v : W.matrix) fro += v * v;
    CHECK(trace_f_of_w(W, EntropyFunction::affine(1.0)) == doctest::Approx(tr).epsilon(1e-12));
    CHECK(trace_f_of_w(W, EntropyFunction::quadratic()) == doctest::Approx(fro).epsilon(1e-12));

    // A spectrum far outside [0,1] is an under-resolution error for entropy kinds.
    CHECK_THROWS_AS(trace_of_spectrum({0.5, 1.2}, EntropyFunction::renyi(1.0)), NumericalError);
    CHECK(trace_of_spectrum({-5e-4, 1.0 + 5e-4}, EntropyFunction::renyi(1.0)) == doctest::Approx(0.0).scale(1e-12));
}

TEST_CASE("trace of eta_1 self-converges under spacing refinement") {
    const auto g = Symbol::gaussian(2);
    const auto disk = Region::ball(2, 1.0);
    const double coarse = trace_f_of_w(build_w(g, disk, 4.0, 1.0 / 16), EntropyFunction::renyi(1.0));
    const double fine = trace_f_of_w(build_w(g, disk, 4.0, 1.0 / 32), EntropyFunction::renyi(1.0));
    CHECK(coarse > 0.0);
    CHECK(rel(coarse, fine) < 0.01);
}

TEST_CASE("hs oracle") {
    const auto g = Symbol::gaussian(2);
    for (double alpha : {1.0, 4.0, 8.0})
        CHECK(hs_oracle_quadratic(g, Region::half_space({0.0, 1.0}), alpha) ==
              doctest::Approx(gaussian_halfplane(alpha)).epsilon(1e-6));
    // d = 3: ǎ² = (2π)^{-3} e^{-s²}, ∫ e^{-s²} s³ ds = 1/2, c' = π.
    CHECK(hs_oracle_quadratic(Symbol::gaussian(3), Region::half_space({0.0, 0.0, 1.0}), 2.0) ==
          doctest::Approx(-4.0 * kPi * 0.5 / std::pow(2 * kPi, 3)).epsilon(1e-6));

    const auto disk = Region::ball(2, 1.0);
    double prev = 1.0;
    for (double alpha : {8.0, 16.0, 32.0}) {
        const double v = hs_oracle_quadratic(g, disk, alpha);
        CHECK(v <= 0.0);
        const double dev = rel(v, 2 * kPi * gaussian_halfplane(alpha));
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 0.05);
    // Both sides of the boundary give the same double integral.
    CHECK(hs_oracle_quadratic(g, disk.complement(), 8.0) == doctest::Approx(hs_oracle_quadratic(g, disk, 8.0)));
    CHECK_THROWS_AS(hs_oracle_quadratic(Symbol::custom(2, [](Point x) { return std::exp(-x[0] * x[0] - 2 * x[1] * x[1]); }, true, "aniso"),
                                        disk, 4.0),
                    std::invalid_argument);
}

TEST_CASE("trace_d against the hs oracle on both routes") {
    const auto g = Symbol::gaussian(2);
    const auto t2 = EntropyFunction::quadratic();
    // Cartesian, disk and box.
    const auto disk = Region::ball(2, 1.0);
    const TraceD cd = trace_d(g, disk, 4.0, t2, 1.0 / 16);
    CHECK(cd.value < 0.0);
    CHECK(cd.route == "cartesian");
    CHECK(rel(cd.value, hs_oracle_quadratic(g, disk, 4.0)) < 0.01);
    const auto box = Region::axis_box({-0.5, -0.75}, {0.5, 0.75});
    CHECK(rel(trace_d(g, box, 4.0, t2, 1.0 / 16).value, hs_oracle_quadratic(g, box, 4.0)) < 0.01);

    // Polar, disk and annulus.
    TraceOptions polar;
    polar.route = Route::polar;
    CHECK(rel(trace_d_many(g, disk, 8.0, {t2}, polar)[0].value, hs_oracle_quadratic(g, disk, 8.0)) < 1e-4);
    const auto ann = Region::annulus(2, 0.5, 1.0);
    CHECK(rel(trace_d_many(g, ann, 6.0, {t2}, polar)[0].value, hs_oracle_quadratic(g, ann, 6.0)) < 1e-4);
    const auto ball3 = Region::ball(3, 1.0);
    CHECK(rel(trace_d_many(Symbol::gaussian(3), ball3, 4.0, {t2}, polar)[0].value,
              hs_oracle_quadratic(Symbol::gaussian(3), ball3, 4.0)) < 1e-4);

    // Polar node counts are converged.
    PolarOptions finer;
    finer.safety = 1.5;
    const auto eta1 = EntropyFunction::renyi(1.0);
    const auto lf = Symbol::limit_fermi(Hamiltonian::quadratic(2));
    const PolarTraces p1 = polar_traces(lf, 0.0, 1.0, 6.0, {eta1});
    const PolarTraces p2 = polar_traces(lf, 0.0, 1.0, 6.0, {eta1}, finer);
    CHECK(rel(p1.trace[0] - p1.volume[0], p2.trace[0] - p2.volume[0]) < 1e-6);

    CHECK_THROWS_AS(trace_d_many(g, Region::axis_box({-1, -1}, {1, 1}), 4.0, {t2}, polar), std::invalid_argument);
    CHECK_THROWS_AS(trace_d(g, disk, 4.0, EntropyFunction::affine(1.0, 0.5), 1.0 / 16), std::invalid_argument);
}

TEST_CASE("trace_d vanishes for linear f") {
    const auto a = Symbol::fermi(Hamiltonian::quadratic(2), 1.0, 0.0);
    const auto lin = EntropyFunction::affine(1.0);
    const TraceD c = trace_d(a, Region::ball(2, 1.0), 4.0, lin, 1.0 / 16);
    CHECK(std::fabs(c.value) <= 1e-6 * c.trace_term);
    TraceOptions polar;
    polar.route = Route::polar;
    const TraceD p = trace_d_many(a, Region::ball(2, 1.0), 6.0, {lin}, polar)[0];
    CHECK(std::fabs(p.value) <= 1e-9 * p.trace_term);
}

TEST_CASE("trace_d over alpha approaches B for the limit symbol") {
    const auto lf = Symbol::limit_fermi(Hamiltonian::quadratic(2));
    const auto disk = Region::ball(2, 1.0);
    const auto eta1 = EntropyFunction::renyi(1.0);
    const double B = b_coefficient(lf, disk, eta1).value;
    double prev = 1.0;
    for (double alpha : {4.0, 6.0, 8.0}) {
        const double v = trace_d_many(lf, disk, alpha, {eta1})[0].value / alpha;
        const double dev = rel(v, B);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("positivity and Berezin bound on discretized operators") {
    const auto h = Hamiltonian::quadratic(2);
    struct Case {
        Symbol a;
        Region r;
        double alpha;
        TraceOptions o;
    };
    TraceOptions cart;
    cart.route = Route::cartesian;
    cart.spacing = 1.0 / 16;
    std::vector<Case> cases = {{Symbol::gaussian(2), Region::axis_box({-0.5, -0.5}, {0.5, 0.5}), 4.0, cart},
                               {Symbol::fermi(h, 1.0, 0.0), Region::ball(2, 1.0), 4.0, cart},
                               {Symbol::limit_fermi(h), Region::annulus(2, 0.5, 1.0), 6.0, {}},
                               {Symbol::model(h, 0.5, 1.0, 2.0), Region::ball(2, 1.0), 6.0, {}}};
    for (const auto& c : cases) {
        for (double gamma : {0.5, 1.0, 1.5, 2.0}) {
            const TraceD t = trace_d_many(c.a, c.r, c.alpha, {EntropyFunction::renyi(gamma)}, c.o)[0];
            // The Berezin bound is trace_term ≥ volume_term, i.e. tr D ≥ 0.
            CHECK(t.value >= -1e-6);
        }
    }
}

TEST_CASE("local entropy") {
    const auto h = Hamiltonian::quadratic(2);
    const auto disk = Region::ball(2, 1.0);
    const auto a = Symbol::fermi(h, 1.0, 0.0);
    const LocalEntropy S = local_entropy(a, disk, 6.0, 1.0, 0.0);
    CHECK(S.density_part == doctest::Approx(entropy_density(h, 1.0, 0.0, 1.0) * 36.0 * kPi).epsilon(1e-8));
    CHECK(S.value >= S.density_part - 1e-6);

    const LocalEntropy z = local_entropy(Symbol::fermi(h, 1.0, -40.0), disk, 6.0, 1.0, 0.0);
    CHECK(std::fabs(z.value) < 1e-12);

    const LocalEntropy coarse = local_entropy(a, disk, 4.0, 1.0, 1.0 / 16);
    const LocalEntropy fine = local_entropy(a, disk, 4.0, 1.0, 1.0 / 32);
    CHECK(rel(coarse.value, fine.value) < 0.01);
    CHECK_THROWS_AS(local_entropy(a, disk.complement(), 4.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("entanglement entropy estimate") {
    const auto h = Hamiltonian::quadratic(2);
    const auto disk = Region::ball(2, 1.0);
    const auto a = Symbol::fermi(h, 1.0, 0.0);
    const EeEstimate e6 = ee_estimate(a, disk, 6.0, 1.0, 0.0, 0.0);
    CHECK(e6.value >= -1e-3);
    CHECK(e6.route == "polar");
    CHECK(e6.stability <= 0.05);

    const EeEstimate e8 = ee_estimate(a, disk, 8.0, 1.0, 0.0, 0.0);
    CHECK(rel(e8.value, 2 * e8.region_part) < 0.1);
    // Complement symmetry of the boundary terms.
    CHECK(rel(e8.complement_part, e8.region_part) < 0.1);

    const EeEstimate z = ee_estimate(Symbol::fermi(h, 1.0, -40.0), disk, 6.0, 1.0, 0.0, 0.0);
    CHECK(std::fabs(z.value) < 1e-10);

    // Box: periodic enclosing domain on the Cartesian route.
    const auto box = Region::axis_box({-0.5, -0.5}, {0.5, 0.5});
    const EeEstimate eb = ee_estimate(a, box, 4.0, 1.0, 1.0 / 16, 0.5);
    CHECK(eb.route == "cartesian-periodic");
    CHECK(eb.value >= -1e-3);
    CHECK(rel(eb.complement_part, eb.region_part) < 0.15);
}

TEST_CASE("scaling scans and reports") {
    const auto h = Hamiltonian::quadratic(2);
    ScanSpec lin;
    lin.mode = ScanMode::fixed_symbol;
    lin.symbol = Symbol::gaussian(2);
    lin.f = EntropyFunction::affine(1.0);
    lin.alphas = {2.0, 4.0};
    lin.trace.route = Route::cartesian;
    lin.trace.spacing = 1.0 / 16;
    for (const auto& r : scaling_scan(lin).rows) {
        CHECK(std::fabs(r.raw_trace) < 1e-6 * std::pow(r.alpha, 2));
        CHECK(r.target == 0.0);
    }

    ScanSpec mu;
    mu.mode = ScanMode::fixed_mu;
    mu.h = h;
    mu.alphas = {6.0, 8.0};
    mu.temperatures = {2.0, 4.0};
    const ScalingReport rm = scaling_scan(mu);
    REQUIRE(rm.rows.size() == 2);
    CHECK(rm.rows[1].deviation < rm.rows[0].deviation);
    CHECK(rm.rows[0].normalization == doctest::Approx(6.0 * std::sqrt(2.0)));

    ScanSpec rho;
    rho.mode = ScanMode::fixed_rho;
    rho.h = h;
    rho.gammas = {3.0};
    rho.alphas = {6.0};
    rho.temperatures = {4.0, 8.0};
    const ScalingReport rr = scaling_scan(rho);
    for (const auto& r : rr.rows) {
        CHECK(r.target < 0.0);
        CHECK(r.normalized < 0.0);
    }
    CHECK(rr.rows[1].deviation < rr.rows[0].deviation);

    // CSV layout and JSON round trip.
    const std::string csv = rm.csv();
    CHECK(csv.rfind("alpha,T,mode,gamma,raw_trace,normalization,normalized,target,deviation\n", 0) == 0);
    CHECK(csv == scaling_scan(mu).csv());
    const ScalingReport back = ScalingReport::from_json(nlohmann::json::parse(rm.to_json().dump()));
    CHECK(back.csv() == csv);
    CHECK(back.to_json() == rm.to_json());

    // Plot: markers and target lines, deterministic.
    const std::string svg = render_plot(rm);
    std::size_t markers = 0;
    for (std::size_t p = svg.find("class=\"marker\""); p != std::string::npos; p = svg.find("class=\"marker\"", p + 1)) ++markers;
    CHECK(markers == 2);
    CHECK(svg.find("class=\"target\"") != std::string::npos);
    CHECK(svg == render_plot(back));
    const std::string empty = render_plot(ScalingReport{});
    CHECK(empty.find("class=\"axis\"") != std::string::npos);
    CHECK(empty.find("class=\"marker\"") == std::string::npos);
    CHECK_THROWS(emit_plot(rm, "/proc/no/such/dir/plot.svg"));
}

TEST_CASE("log-log slope") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(-3.0 * std::pow(v, -1.5));
    CHECK(loglog_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(loglog_slope({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}
