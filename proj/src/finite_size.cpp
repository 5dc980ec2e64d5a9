#include "fent/finite_size.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <lapacke.h>

#include "fent/errors.hpp"
#include "fent/kernel.hpp"
#include "fent/widom.hpp"

namespace fent {

namespace {

constexpr double kPi = std::numbers::pi;

// Cell-centred lattice on a box: coordinate origin[i] + k h, k in [0, n[i]).
struct Lattice {
    int d = 2;
    double h = 1.0;
    std::vector<int> n;
    std::vector<double> origin;
    std::vector<int> index;  // selected points, d integers each
    bool periodic = false;

    std::size_t size() const { return index.size() / static_cast<std::size_t>(d); }
    double coordinate(std::size_t p, int i) const { return origin[i] + index[p * d + i] * h; }
};

Lattice box_lattice(const std::vector<double>& lo, const std::vector<double>& hi, double h) {
    Lattice L;
    L.d = static_cast<int>(lo.size());
    L.h = h;
    for (int i = 0; i < L.d; ++i) {
        const int n = std::max(1, static_cast<int>(std::ceil((hi[i] - lo[i]) / h - 1e-9)));
        L.n.push_back(n);
        L.origin.push_back(0.5 * (lo[i] + hi[i]) - 0.5 * (n - 1) * h);
    }
    return L;
}

template <class Pred>
void select_points(Lattice& L, Pred keep, std::size_t cap) {
    std::vector<int> k(L.d, 0);
    std::vector<double> x(L.d);
    std::size_t total = 1;
    for (int n : L.n) total *= static_cast<std::size_t>(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t r = flat;
        for (int i = L.d - 1; i >= 0; --i) {
            k[i] = static_cast<int>(r % L.n[i]);
            r /= L.n[i];
            x[i] = L.origin[i] + k[i] * L.h;
        }
        if (!keep(Point(x))) continue;
        L.index.insert(L.index.end(), k.begin(), k.end());
        if (L.size() > cap)
            throw std::invalid_argument("build_w: more than " + std::to_string(cap) +
                                        " lattice points; increase the spacing or the node cap");
    }
}

int wrap(int delta, int n) {
    delta %= n;
    if (delta < 0) delta += n;
    return std::min(delta, n - delta);
}

// Dense α^d h^d ǎ(α h Δ) over the selected points, one kernel evaluation per
// distinct offset.
std::vector<double> assemble(const Symbol& a, const Lattice& L, double alpha, const QuadratureSpec& quad) {
    const int d = L.d;
    const std::size_t N = L.size();
    const double scale = std::pow(alpha * L.h, d);
    std::vector<int> span(d);
    for (int i = 0; i < d; ++i) span[i] = L.periodic ? L.n[i] / 2 : L.n[i] - 1;
    double zmax2 = 0.0;
    for (int s : span) zmax2 += static_cast<double>(s) * s;
    const KernelTransform kt(a, alpha * L.h * std::sqrt(zmax2), quad);

    auto offset = [&](std::size_t p, std::size_t q, int i) {
        const int delta = L.index[p * d + i] - L.index[q * d + i];
        return L.periodic ? wrap(delta, L.n[i]) : delta;
    };

    std::vector<double> M(N * N);
    if (a.radial()) {
        const auto smax = static_cast<std::size_t>(zmax2);
        std::vector<char> needed(smax + 1, 0);
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p; q < N; ++q) {
                std::size_t s = 0;
                for (int i = 0; i < d; ++i) {
                    const int o = offset(p, q, i);
                    s += static_cast<std::size_t>(o * o);
                }
                needed[s] = 1;
            }
        std::vector<std::size_t> keys;
        for (std::size_t s = 0; s <= smax; ++s)
            if (needed[s]) keys.push_back(s);
        std::vector<double> table(smax + 1, 0.0);
        parallel_for(keys.size(), [&](std::size_t j) {
            table[keys[j]] = scale * kt(alpha * L.h * std::sqrt(static_cast<double>(keys[j])));
        });
        parallel_for(N, [&](std::size_t p) {
            for (std::size_t q = 0; q < N; ++q) {
                std::size_t s = 0;
                for (int i = 0; i < d; ++i) {
                    const int o = offset(p, q, i);
                    s += static_cast<std::size_t>(o * o);
                }
                M[p * N + q] = table[s];
            }
        });
        return M;
    }
    // Offsets range over [-span, span]^d; ǎ is even so half would do, but
    // the table is small next to the matrix.
    std::vector<int> width(d), stride(d);
    std::size_t total = 1;
    for (int i = d - 1; i >= 0; --i) {
        width[i] = 2 * span[i] + 1;
        stride[i] = static_cast<int>(total);
        total *= static_cast<std::size_t>(width[i]);
    }
    std::vector<double> table(total, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> needed(total, 0);
    auto key = [&](std::size_t p, std::size_t q) {
        std::size_t k = 0;
        for (int i = 0; i < d; ++i) k += static_cast<std::size_t>(offset(p, q, i) + span[i]) * stride[i];
        return k;
    };
    for (std::size_t p = 0; p < N; ++p)
        for (std::size_t q = 0; q < N; ++q) needed[key(p, q)] = 1;
    std::vector<std::size_t> keys;
    for (std::size_t k = 0; k < total; ++k)
        if (needed[k]) keys.push_back(k);
    parallel_for(keys.size(), [&](std::size_t j) {
        std::size_t r = keys[j];
        std::vector<double> z(d);
        for (int i = 0; i < d; ++i) {
            const int o = static_cast<int>(r / stride[i]) - span[i];
            r %= stride[i];
            z[i] = alpha * L.h * o;
        }
        table[keys[j]] = scale * kt(Point(z));
    });
    parallel_for(N, [&](std::size_t p) {
        for (std::size_t q = 0; q < N; ++q) M[p * N + q] = table[key(p, q)];
    });
    return M;
}

bool polar_eligible(const Symbol& a, const Region& region) {
    if (!a.radial() || region.complemented()) return false;
    if (region.shape() == Shape::annulus) return true;
    if (region.shape() != Shape::ball) return false;
    for (double c : region.center())
        if (c != 0.0) return false;
    return true;
}

void check_f(const EntropyFunction& f) {
    const double f0 = f.kind() == EntropyKind::log ? -std::numeric_limits<double>::infinity() : f(0.0);
    if (!(std::fabs(f0) <= 1e-14))
        throw std::invalid_argument("trace_d: f(0) must vanish for the trace class property (got f = " + f.tag() + ")");
}

double density_integral(const Symbol& a, const EntropyFunction& f, const QuadratureSpec& quad) {
    const bool poly = f.is_polynomial();
    return symbol_integral(a, [&](double t) { return poly ? f(t) : f(std::clamp(t, 0.0, 1.0)); }, quad);
}

std::vector<TraceD> cartesian_traces(const Symbol& a, const Region& region, double alpha,
                                     const std::vector<EntropyFunction>& fs, const TraceOptions& opts) {
    const double h = opts.spacing > 0.0 ? opts.spacing : spacing_rule(alpha, region);
    const DiscretizedOperator W = build_w(a, region, alpha, h, opts.node_cap);
    const std::vector<double> ev = eigenvalues(W);
    std::vector<TraceD> out;
    for (const auto& f : fs) {
        TraceD t;
        t.trace_term = trace_of_spectrum(ev, f);
        t.volume_term = std::pow(alpha, a.dimension()) * W.measure() * density_integral(a, f, opts.quad);
        t.value = t.trace_term - t.volume_term;
        t.nodes = W.size();
        t.route = "cartesian";
        out.push_back(t);
    }
    return out;
}

std::vector<TraceD> polar_route(const Symbol& a, double r_in, double r_out, double alpha,
                                const std::vector<EntropyFunction>& fs, const PolarOptions& opts) {
    const PolarTraces p = polar_traces(a, r_in, r_out, alpha, fs, opts);
    std::vector<TraceD> out;
    for (std::size_t q = 0; q < fs.size(); ++q)
        out.push_back({p.trace[q] - p.volume[q], p.trace[q], p.volume[q],
                       static_cast<std::size_t>(p.nodes_r) * static_cast<std::size_t>(p.channels), "polar"});
    return out;
}

}  // namespace

double DiscretizedOperator::measure() const { return static_cast<double>(size()) * std::pow(spacing, dimension); }

double spacing_rule(double alpha, const Region& region) {
    if (!(alpha > 0.0)) throw std::invalid_argument("spacing_rule: alpha must be positive");
    return std::min(1.0 / (4.0 * alpha), region.feature_size() / 8.0);
}

DiscretizedOperator build_w(const Symbol& a, const Region& region, double alpha, double spacing, std::size_t node_cap) {
    if (a.dimension() != region.dimension()) throw std::invalid_argument("build_w: symbol and region dimensions differ");
    if (!region.bounded()) throw std::invalid_argument("build_w: region must be bounded");
    if (!(alpha > 0.0) || !(spacing > 0.0)) throw std::invalid_argument("build_w: alpha and spacing must be positive");
    if (!a.even()) throw std::invalid_argument("build_w: symbol must be even for a symmetric matrix");
    const int d = a.dimension();
    Lattice L = box_lattice(region.lower(), region.upper(), spacing);
    select_points(L, [&](Point x) { return region.contains(x); }, node_cap);
    if (L.size() == 0) throw std::invalid_argument("build_w: no lattice point inside the region");

    DiscretizedOperator W;
    W.dimension = d;
    W.alpha = alpha;
    W.spacing = spacing;
    W.symbol_tag = a.tag();
    W.region_tag = region.tag();
    for (std::size_t p = 0; p < L.size(); ++p)
        for (int i = 0; i < d; ++i) W.nodes.push_back(L.coordinate(p, i));
    W.matrix = assemble(a, L, alpha, {});
    return W;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> matrix, std::size_t n) {
    if (matrix.size() != n * n) throw std::invalid_argument("symmetric_eigenvalues: size mismatch");
    std::vector<double> ev(n);
    if (n == 0) return ev;
    const int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', static_cast<lapack_int>(n), matrix.data(),
                                    static_cast<lapack_int>(n), ev.data());
    if (info != 0) throw NumericalError("symmetric_eigenvalues: dsyevd failed", info);
    return ev;
}

std::vector<double> eigenvalues(const DiscretizedOperator& W) { return symmetric_eigenvalues(W.matrix, W.size()); }

double trace_of_spectrum(const std::vector<double>& ev, const EntropyFunction& f) {
    double s = 0.0;
    if (f.is_polynomial()) {
        for (double lam : ev) s += f(lam);
        return s;
    }
    for (double lam : ev) {
        if (lam < -1e-3 || lam > 1.0 + 1e-3)
            throw NumericalError("trace_f_of_w: eigenvalue outside [0,1]; the grid under-resolves the symbol", lam);
        s += f(std::clamp(lam, 0.0, 1.0));
    }
    return s;
}

double trace_f_of_w(const DiscretizedOperator& W, const EntropyFunction& f) { return trace_of_spectrum(eigenvalues(W), f); }

TraceD trace_d(const Symbol& a, const Region& region, double alpha, const EntropyFunction& f, double spacing) {
    TraceOptions opts;
    opts.route = Route::cartesian;
    opts.spacing = spacing;
    return trace_d_many(a, region, alpha, {f}, opts).front();
}

std::vector<TraceD> trace_d_many(const Symbol& a, const Region& region, double alpha,
                                 const std::vector<EntropyFunction>& fs, const TraceOptions& opts) {
    for (const auto& f : fs) check_f(f);
    if (a.dimension() != region.dimension()) throw std::invalid_argument("trace_d: symbol and region dimensions differ");
    const bool polar = opts.route == Route::polar || (opts.route == Route::automatic && polar_eligible(a, region));
    if (polar) {
        if (!polar_eligible(a, region))
            throw std::invalid_argument("trace_d: polar route needs a radial symbol on a centred ball or annulus");
        const double r_in = region.shape() == Shape::annulus ? region.inner_radius() : 0.0;
        return polar_route(a, r_in, region.radius(), alpha, fs, opts.polar);
    }
    return cartesian_traces(a, region, alpha, fs, opts);
}

double hs_oracle_quadratic(const Symbol& a, const Region& region, double alpha, const QuadratureSpec& quad) {
    const int d = a.dimension();
    if (!a.radial()) throw std::invalid_argument("hs_oracle_quadratic: radial symbols only");
    if (d != region.dimension()) throw std::invalid_argument("hs_oracle_quadratic: dimension mismatch");
    if (!(alpha > 0.0)) throw std::invalid_argument("hs_oracle_quadratic: alpha must be positive");

    // Transform range: extend until ǎ(s)² s^d has decayed.
    double smax = 8.0;
    for (;;) {
        const KernelTransform kt(a, smax, quad);
        const double peak = kt(0.0) * kt(0.0);
        double edge = 0.0;
        for (double s = 0.5 * smax; s <= smax; s += smax / 64) edge = std::max(edge, kt(s) * kt(s) * std::pow(s, d));
        if (edge <= 1e-14 * peak) break;
        smax *= 2.0;
        if (smax > 4096) throw NumericalError("hs_oracle_quadratic: kernel does not decay", edge / peak);
    }
    const KernelTransform kt(a, smax, quad);

    if (region.shape() == Shape::half_space) {
        // Per unit boundary: -α^{d-1} ∫_{S} (ω·n)_+ dω ∫ ǎ(s)² s^d ds.
        const double cd = d == 2 ? 2.0 : kPi;
        double prev = 0.0;
        for (int panels = 16;; panels *= 2) {
            const Rule r = composite_gauss_legendre(16, panels, 0.0, smax);
            double I = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) I += r.w[i] * kt(r.x[i]) * kt(r.x[i]) * std::pow(r.x[i], d);
            const double v = -std::pow(alpha, d - 1) * cd * I;
            if (panels > 16 && std::fabs(v - prev) <= 1e-4 * std::fabs(v)) return v;
            prev = v;
            if (panels > 4096) throw NumericalError("hs_oracle_quadratic: no convergence", std::fabs(v - prev));
        }
    }
    // The two sides of a boundary give the same double integral.
    const Region base = region.complemented() ? region.complement() : region;
    const double vol = base.volume();
    const double diam = 2.0 * base.outer_radius() + 1e-12;

    // Φ(ρ) = ∫_{S^{d-1}} (|Λ| - cov(ρω)) dω
    auto phi = [&](double rho, int ang) -> double {
        if (base.shape() != Shape::axis_box) {
            std::vector<double> z(d, 0.0);
            z[0] = rho;
            return sphere_area(d) * (vol - base.covariogram(Point(z)));
        }
        double s = 0.0;
        std::vector<double> z(d);
        if (d == 2) {
            const Rule r = composite_gauss_legendre(8, 4 * ang, 0.0, 2 * kPi);
            for (std::size_t i = 0; i < r.size(); ++i) {
                z[0] = rho * std::cos(r.x[i]);
                z[1] = rho * std::sin(r.x[i]);
                s += r.w[i] * (vol - base.covariogram(Point(z)));
            }
            return s;
        }
        const Rule rc = composite_gauss_legendre(8, 2 * ang, -1.0, 1.0);
        const Rule rp = composite_gauss_legendre(8, 4 * ang, 0.0, 2 * kPi);
        for (std::size_t i = 0; i < rc.size(); ++i) {
            const double st = std::sqrt(1.0 - rc.x[i] * rc.x[i]);
            for (std::size_t j = 0; j < rp.size(); ++j) {
                z[0] = rho * st * std::cos(rp.x[j]);
                z[1] = rho * st * std::sin(rp.x[j]);
                z[2] = rho * rc.x[i];
                s += rc.w[i] * rp.w[j] * (vol - base.covariogram(Point(z)));
            }
        }
        return s;
    };
    // -α^d ∫ ǎ(s)² s^{d-1} Φ(s/α) ds, with a panel break where cov vanishes.
    auto integrate = [&](int panels, int ang) {
        double total = 0.0;
        const double brk = std::min(alpha * diam, smax);
        auto piece = [&](double lo, double hi) {
            if (hi <= lo) return;
            const Rule r = composite_gauss_legendre(16, panels, lo, hi);
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double k = kt(r.x[i]);
                total += r.w[i] * k * k * std::pow(r.x[i], d - 1) * phi(r.x[i] / alpha, ang);
            }
        };
        piece(0.0, brk);
        piece(brk, smax);
        return -std::pow(alpha, d) * total;
    };
    double prev = integrate(8, 4);
    std::vector<double> history{prev};
    for (int level = 1; level <= 6; ++level) {
        const double v = integrate(8 << level, 4 << level);
        history.push_back(v);
        if (std::fabs(v - prev) <= 1e-4 * std::fabs(v)) return v;
        prev = v;
    }
    throw NumericalError("hs_oracle_quadratic: refinement did not settle", std::fabs(history.back() - history[history.size() - 2]),
                         history);
}

LocalEntropy local_entropy(const Symbol& a, const Region& region, double alpha, double gamma, double spacing,
                           const TraceOptions& opts) {
    if (!region.bounded()) throw std::invalid_argument("local_entropy: region must be bounded");
    TraceOptions o = opts;
    if (spacing > 0.0) {
        o.route = Route::cartesian;
        o.spacing = spacing;
    }
    const auto f = EntropyFunction::renyi(gamma);
    const TraceD td = trace_d_many(a, region, alpha, {f}, o).front();
    const double dens = std::pow(alpha, a.dimension()) * region.volume() * density_integral(a, f, o.quad);
    return {dens + td.value, dens, td.value};
}

namespace {

double polar_ee(const Symbol& a, double R, double margin, double alpha, const EntropyFunction& f, const PolarOptions& po,
                double d_region, double* complement_part) {
    const double Ro = R + margin;
    const double ann = polar_route(a, R, Ro, alpha, {f}, po).front().value;
    const double outer = polar_route(a, 0.0, Ro, alpha, {f}, po).front().value;
    *complement_part = ann - outer;
    return d_region + *complement_part;
}

double torus_ee(const Symbol& a, const Region& region, double margin, double alpha, double h, const EntropyFunction& f,
                const TraceOptions& opts, double* region_part, double* complement_part) {
    auto lo = region.lower(), hi = region.upper();
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] -= margin;
        hi[i] += margin;
    }
    Lattice all = box_lattice(lo, hi, h);
    all.periodic = true;
    Lattice in = all, out = all;
    select_points(in, [&](Point x) { return region.contains(x); }, opts.node_cap);
    select_points(out, [&](Point x) { return !region.contains(x); }, opts.node_cap);
    const double dens = std::pow(alpha, a.dimension()) * density_integral(a, f, opts.quad);
    auto part = [&](const Lattice& L) {
        const std::vector<double> ev = symmetric_eigenvalues(assemble(a, L, alpha, opts.quad), L.size());
        return trace_of_spectrum(ev, f) - dens * static_cast<double>(L.size()) * std::pow(h, L.d);
    };
    *region_part = part(in);
    *complement_part = part(out);
    return *region_part + *complement_part;
}

}  // namespace

EeEstimate ee_estimate(const Symbol& a, const Region& region, double alpha, double gamma, double spacing, double box_margin,
                       const TraceOptions& opts) {
    if (!region.bounded()) throw std::invalid_argument("ee_estimate: region must be bounded");
    if (a.dimension() != region.dimension()) throw std::invalid_argument("ee_estimate: dimension mismatch");
    const auto f = EntropyFunction::renyi(gamma);
    const double m = box_margin > 0.0 ? box_margin : 4.0 / alpha;
    EeEstimate e{};
    e.margin = m;
    double c2 = 0.0;
    if (polar_eligible(a, region) && region.shape() == Shape::ball && spacing <= 0.0 && opts.route != Route::cartesian) {
        e.route = "polar";
        e.region_part = polar_route(a, 0.0, region.radius(), alpha, {f}, opts.polar).front().value;
        e.value = polar_ee(a, region.radius(), m, alpha, f, opts.polar, e.region_part, &e.complement_part);
        e.doubled_value = polar_ee(a, region.radius(), 2 * m, alpha, f, opts.polar, e.region_part, &c2);
    } else {
        e.route = "cartesian-periodic";
        const double h = spacing > 0.0 ? spacing : (opts.spacing > 0.0 ? opts.spacing : spacing_rule(alpha, region));
        double r2 = 0.0;
        e.value = torus_ee(a, region, m, alpha, h, f, opts, &e.region_part, &e.complement_part);
        e.doubled_value = torus_ee(a, region, 2 * m, alpha, h, f, opts, &r2, &c2);
    }
    e.stability = std::fabs(e.value - e.doubled_value) / std::max(std::fabs(e.value), 1e-300);
    if (e.stability > 0.05)
        throw NumericalError("ee_estimate: margin doubling changed the estimate by more than 5%", e.stability,
                             {e.value, e.doubled_value});
    return e;
}

// ---------------------------------------------------------------------------

std::string to_string(ScanMode m) {
    switch (m) {
    case ScanMode::fixed_symbol:
        return "fixed_symbol";
    case ScanMode::fixed_mu:
        return "fixed_mu";
    case ScanMode::fixed_rho:
        return "fixed_rho";
    }
    return "fixed_symbol";
}

ScanMode parse_scan_mode(const std::string& s) {
    if (s == "fixed_symbol" || s == "fixed-symbol") return ScanMode::fixed_symbol;
    if (s == "fixed_mu" || s == "fixed-mu") return ScanMode::fixed_mu;
    if (s == "fixed_rho" || s == "fixed-rho") return ScanMode::fixed_rho;
    throw std::invalid_argument("unknown scan mode: " + s);
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string ScalingReport::csv() const {
    std::ostringstream os;
    os << "alpha,T,mode,gamma,raw_trace,normalization,normalized,target,deviation\n";
    for (const auto& r : rows)
        os << fmt(r.alpha) << ',' << fmt(r.T) << ',' << to_string(mode) << ',' << fmt(r.gamma) << ',' << fmt(r.raw_trace)
           << ',' << fmt(r.normalization) << ',' << fmt(r.normalized) << ',' << fmt(r.target) << ',' << fmt(r.deviation)
           << '\n';
    return os.str();
}

nlohmann::json ScalingReport::to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows)
        rs.push_back({{"alpha", r.alpha},
                      {"T", r.T},
                      {"gamma", r.gamma},
                      {"mu", r.mu},
                      {"raw_trace", r.raw_trace},
                      {"normalization", r.normalization},
                      {"normalized", r.normalized},
                      {"target", r.target},
                      {"deviation", r.deviation},
                      {"scale", r.scale},
                      {"nodes", r.nodes}});
    return {{"mode", to_string(mode)}, {"rows", rs}};
}

ScalingReport ScalingReport::from_json(const nlohmann::json& j) {
    ScalingReport rep;
    rep.mode = parse_scan_mode(j.at("mode").get<std::string>());
    for (const auto& r : j.at("rows")) {
        ScalingRow row;
        row.alpha = r.at("alpha").get<double>();
        row.T = r.at("T").get<double>();
        row.gamma = r.at("gamma").get<double>();
        row.mu = r.value("mu", 0.0);
        row.raw_trace = r.at("raw_trace").get<double>();
        row.normalization = r.at("normalization").get<double>();
        row.normalized = r.at("normalized").get<double>();
        row.target = r.at("target").get<double>();
        row.deviation = r.at("deviation").get<double>();
        row.scale = r.value("scale", 0.0);
        row.nodes = r.value("nodes", std::size_t{0});
        rep.rows.push_back(row);
    }
    return rep;
}

std::vector<ScalingRow> ScalingReport::for_gamma(double gamma) const {
    std::vector<ScalingRow> out;
    for (const auto& r : rows)
        if (std::fabs(r.gamma - gamma) <= 1e-12) out.push_back(r);
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || y[i] == 0.0) throw std::invalid_argument("loglog_slope: x must be positive and y nonzero");
        const double lx = std::log(x[i]), ly = std::log(std::fabs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("loglog_slope: x values coincide");
    return (n * sxy - sx * sy) / den;
}

ScalingReport scaling_scan(const ScanSpec& spec) {
    ScalingReport rep;
    rep.mode = spec.mode;
    if (spec.alphas.empty()) throw std::invalid_argument("scaling_scan: empty alpha list");
    if (spec.gammas.empty() && !spec.f) throw std::invalid_argument("scaling_scan: no entropy function");

    if (spec.mode == ScanMode::fixed_symbol) {
        if (!spec.symbol) throw std::invalid_argument("scaling_scan: fixed_symbol mode needs a symbol");
        const Symbol& a = *spec.symbol;
        const int d = a.dimension();
        std::vector<EntropyFunction> fs;
        std::vector<double> gs;
        if (spec.f) {
            fs.push_back(*spec.f);
            gs.push_back(spec.f->gamma());
        } else {
            for (double g : spec.gammas) {
                fs.push_back(EntropyFunction::renyi(g));
                gs.push_back(g);
            }
        }
        std::vector<double> targets(fs.size(), 0.0);
        if (spec.compute_targets)
            for (std::size_t q = 0; q < fs.size(); ++q) targets[q] = b_coefficient(a, spec.region, fs[q], spec.quad).value;
        for (double alpha : spec.alphas) {
            const auto tds = trace_d_many(a, spec.region, alpha, fs, spec.trace);
            for (std::size_t q = 0; q < fs.size(); ++q) {
                ScalingRow r;
                r.alpha = alpha;
                r.gamma = gs[q];
                r.raw_trace = tds[q].value;
                r.normalization = std::pow(alpha, d - 1);
                r.scale = alpha;
                r.normalized = r.raw_trace / r.normalization;
                r.target = targets[q];
                r.deviation = std::fabs(r.normalized - r.target) / std::max(std::fabs(r.target), 1e-300);
                r.nodes = tds[q].nodes;
                rep.rows.push_back(r);
            }
        }
        return rep;
    }

    if (!spec.h) throw std::invalid_argument("scaling_scan: temperature modes need a Hamiltonian");
    const Hamiltonian& h = *spec.h;
    const int d = h.dimension();
    const double m = h.degree_half();
    std::size_t n = std::max(spec.alphas.size(), spec.temperatures.size());
    if (spec.temperatures.empty()) throw std::invalid_argument("scaling_scan: empty temperature list");
    if (spec.alphas.size() != n && spec.alphas.size() != 1)
        throw std::invalid_argument("scaling_scan: alpha and T lists must have equal length or one entry");
    if (spec.temperatures.size() != n && spec.temperatures.size() != 1)
        throw std::invalid_argument("scaling_scan: alpha and T lists must have equal length or one entry");

    const bool rho_mode = spec.mode == ScanMode::fixed_rho;
    std::vector<EntropyFunction> fs;
    std::vector<double> targets(spec.gammas.size(), 0.0);
    for (std::size_t q = 0; q < spec.gammas.size(); ++q) {
        const double g = spec.gammas[q];
        fs.push_back(rho_mode ? table1(g).f : EntropyFunction::renyi(g));
        if (!spec.compute_targets) continue;
        if (rho_mode)
            targets[q] = b_coefficient(Symbol::boltzmann(h), spec.region, table1(g).eta_eff, spec.quad).value;
        else
            targets[q] = b_coefficient(Symbol::limit_fermi(h), spec.region, EntropyFunction::renyi(g), spec.quad).value;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double alpha = spec.alphas.size() == 1 ? spec.alphas[0] : spec.alphas[i];
        const double T = spec.temperatures.size() == 1 ? spec.temperatures[0] : spec.temperatures[i];
        double mu = spec.mu, lam = 1.0;
        if (rho_mode) {
            const MuSolution s = solve_mu(h, T, spec.rho, 1e-12 * spec.rho, spec.quad);
            mu = s.mu;
            lam = s.lambda;
        }
        const Symbol a = Symbol::fermi(h, T, mu);
        const auto tds = trace_d_many(a, spec.region, alpha, fs, spec.trace);
        for (std::size_t q = 0; q < fs.size(); ++q) {
            ScalingRow r;
            r.alpha = alpha;
            r.T = T;
            r.gamma = spec.gammas[q];
            r.mu = mu;
            r.raw_trace = tds[q].value;
            r.scale = alpha * std::pow(T, 1.0 / (2 * m));
            r.normalization = std::pow(r.scale, d - 1);
            if (rho_mode) r.normalization *= std::pow(lam, table1(spec.gammas[q]).delta);
            r.normalized = r.raw_trace / r.normalization;
            r.target = targets[q];
            r.deviation = std::fabs(r.normalized - r.target) / std::max(std::fabs(r.target), 1e-300);
            r.nodes = tds[q].nodes;
            rep.rows.push_back(r);
        }
    }
    return rep;
}

}  // namespace fent
