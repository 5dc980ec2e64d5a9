#include "fent/widom.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "fent/errors.hpp"
#include "fent/kernel.hpp"

namespace fent {

namespace {

constexpr double kPi = std::numbers::pi;

// Orthonormal frame {e, e⊥...} by Gram–Schmidt against the standard basis.
std::vector<std::vector<double>> make_frame(std::vector<double> e) {
    const int d = static_cast<int>(e.size());
    const double n = norm(e);
    if (!(n > 0.0)) throw std::invalid_argument("a_functional: direction must be nonzero");
    for (double& v : e) v /= n;
    std::vector<std::vector<double>> frame{e};
    for (int k = 0; k < d && static_cast<int>(frame.size()) < d; ++k) {
        std::vector<double> v(d, 0.0);
        v[k] = 1.0;
        for (const auto& b : frame) {
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += v[i] * b[i];
            for (int i = 0; i < d; ++i) v[i] -= dot * b[i];
        }
        const double vn = norm(v);
        if (vn < 1e-8) continue;
        for (double& x : v) x /= vn;
        frame.push_back(v);
    }
    return frame;
}

struct LineSums {
    double j[3] = {0.0, 0.0, 0.0};  // cutoffs ε, ε/2, ε/4
};

// J(ξ⊥) for the profile g(x) = a(x e + ξ⊥) supported in [-Lp, Lp]:
//   2 ∫_{t>ε} G(t)/t² dt + 2 ∫ U(g(x),0)[1/(Lp-x) + 1/(Lp+x)] dx,
//   G(t) = ∫_{-Lp}^{Lp-t} U(g(x), g(x+t)) dx.
LineSums line_integral(const std::function<double(double)>& g, double Lp, const UFunctional& U,
                       const QuadratureSpec& q, const Rule& xref) {
    LineSums out;
    if (!(Lp > 0.0)) return out;
    auto G = [&](double t) {
        if (t >= 2 * Lp) return 0.0;
        const double mid = -0.5 * t, half = Lp - 0.5 * t;
        double s = 0.0;
        for (std::size_t i = 0; i < xref.size(); ++i) {
            const double x = mid + half * xref.x[i];
            s += xref.w[i] * U(g(x), g(x + t));
        }
        return half * s;
    };
    const double eps = q.pv_cutoff;
    const double tmax = q.t_max > 0.0 ? std::min(q.t_max, 2 * Lp) : 2 * Lp;

    // log-spaced Gauss–Legendre: ∫ 2G(t)/t² dt = ∫ 2G(e^s) e^{-s} ds
    auto log_piece = [&](double a, double b, int n) {
        if (!(b > a)) return 0.0;
        const Rule r = gauss_legendre(n, std::log(a), std::log(b));
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double t = std::exp(r.x[i]);
            s += r.w[i] * 2.0 * G(t) / t;
        }
        return s;
    };
    double main = 0.0;
    if (eps < tmax) {
        const double t1 = std::min(1.0, tmax);
        main += log_piece(eps, t1, q.nodes_t);
        if (tmax > 1.0) main += log_piece(std::max(1.0, eps), tmax, q.nodes_t);
    }
    double tail = 0.0;
    for (std::size_t i = 0; i < xref.size(); ++i) {
        const double x = Lp * xref.x[i];
        tail += xref.w[i] * U(g(x), 0.0) * (1.0 / (Lp - x) + 1.0 / (Lp + x));
    }
    tail *= 2.0 * Lp;

    out.j[0] = main + tail;
    out.j[1] = out.j[0] + log_piece(0.5 * eps, std::min(eps, tmax), 8);
    out.j[2] = out.j[1] + log_piece(0.25 * eps, std::min(0.5 * eps, tmax), 8);
    return out;
}

CoefficientResult finish(double value, double err, Method m, const Symbol& a, const std::string& region,
                         const EntropyFunction& f) {
    CoefficientResult r;
    r.value = value;
    r.error_estimate = err;
    r.method = m;
    r.symbol_tag = a.tag();
    r.region_tag = region;
    r.f_tag = f.tag();
    return r;
}

double boundary_factor(const Region& region) { return std::pow(2 * kPi, 1 - region.dimension()); }

}  // namespace

std::string to_string(Method m) {
    switch (m) {
    case Method::pv_quadrature:
        return "pv_quadrature";
    case Method::parseval:
        return "parseval";
    case Method::closed_form:
        return "closed_form";
    case Method::series:
        return "series";
    case Method::hs_oracle:
        return "hs_oracle";
    }
    return "unknown";
}

Method parse_method(const std::string& s) {
    for (Method m : {Method::pv_quadrature, Method::parseval, Method::closed_form, Method::series, Method::hs_oracle})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown method: " + s);
}

nlohmann::json CoefficientResult::to_json() const {
    nlohmann::json j{{"value", value},
                     {"error_estimate", error_estimate},
                     {"method", to_string(method)},
                     {"symbol_tag", symbol_tag},
                     {"region_tag", region_tag},
                     {"f_tag", f_tag}};
    if (!note.empty()) j["note"] = note;
    return j;
}

CoefficientResult CoefficientResult::from_json(const nlohmann::json& j) {
    CoefficientResult r;
    r.value = j.at("value").get<double>();
    r.error_estimate = j.at("error_estimate").get<double>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.symbol_tag = j.at("symbol_tag").get<std::string>();
    r.region_tag = j.at("region_tag").get<std::string>();
    r.f_tag = j.at("f_tag").get<std::string>();
    r.note = j.value("note", "");
    return r;
}

CoefficientResult a_functional(const Symbol& a, const std::vector<double>& e, const EntropyFunction& f,
                               const QuadratureSpec& quad) {
    quad.validate();
    const int d = a.dimension();
    if (static_cast<int>(e.size()) != d) throw std::invalid_argument("a_functional: direction dimension mismatch");
    if (!a.even()) throw std::invalid_argument("a_functional: symbol must be even");
    if (f.is_affine()) return finish(0.0, 0.0, Method::pv_quadrature, a, "direction", f);

    const auto frame = make_frame(e);
    const double L = quad.xi_radius > 0.0 ? quad.xi_radius : a.decay_radius(quad.support_threshold);
    const UFunctional U(f, quad.tolerance, quad.refinement_levels);
    const Rule xref = composite_gauss_legendre(16, std::max(1, quad.nodes_x / 16), -1.0, 1.0);

    // Perpendicular nodes: radial symbols only see ρ = |ξ⊥|.
    struct Line {
        std::vector<double> perp;  // ξ⊥ in ℝ^d
        double weight;
    };
    std::vector<Line> lines;
    if (a.radial()) {
        const Rule r = gauss_legendre(quad.nodes_perp, 0.0, L);
        const double shell = d == 2 ? 2.0 : 2 * kPi;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::vector<double> p(d, 0.0);
            for (int k = 0; k < d; ++k) p[k] = r.x[i] * frame[1][k];
            lines.push_back({p, r.w[i] * shell * std::pow(r.x[i], d - 2)});
        }
    } else {
        const Rule r = gauss_legendre(quad.nodes_perp, -L, L);
        if (d == 2) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                std::vector<double> p(2);
                for (int k = 0; k < 2; ++k) p[k] = r.x[i] * frame[1][k];
                lines.push_back({p, r.w[i]});
            }
        } else {
            for (std::size_t i = 0; i < r.size(); ++i)
                for (std::size_t j = 0; j < r.size(); ++j) {
                    std::vector<double> p(3);
                    for (int k = 0; k < 3; ++k) p[k] = r.x[i] * frame[1][k] + r.x[j] * frame[2][k];
                    lines.push_back({p, r.w[i] * r.w[j]});
                }
        }
    }

    std::vector<LineSums> sums(lines.size());
    parallel_for(lines.size(), [&](std::size_t li) {
        const auto& line = lines[li];
        const double rho2 = [&] {
            double s = 0.0;
            for (double v : line.perp) s += v * v;
            return s;
        }();
        if (rho2 >= L * L) return;
        const double Lp = std::sqrt(L * L - rho2);
        std::function<double(double)> g;
        if (a.radial()) {
            g = [&, rho2](double x) { return a.radial_value(std::sqrt(x * x + rho2)); };
        } else {
            g = [&](double x) {
                std::vector<double> xi(line.perp);
                for (int k = 0; k < d; ++k) xi[k] += x * frame[0][k];
                return a(xi);
            };
        }
        sums[li] = line_integral(g, Lp, U, quad, xref);
    });

    double I[3] = {0.0, 0.0, 0.0};
    for (std::size_t li = 0; li < lines.size(); ++li)
        for (int k = 0; k < 3; ++k) I[k] += lines[li].weight * sums[li].j[k];
    for (double& v : I) v /= 8 * kPi * kPi;

    // Richardson in ε for an error expansion c₁ε + c₂ε².
    const double r1 = I[0] - I[1], r2 = I[1] - I[2];
    const double scale = std::max({std::fabs(I[0]), std::fabs(I[1]), std::fabs(I[2]), 1e-300});
    const double noise = 1e-13 * scale;
    if (std::fabs(r1) > noise && std::fabs(r2) > noise && (r1 > 0) != (r2 > 0))
        throw NumericalError("a_functional: non-monotone ε-extrapolation residuals", std::fabs(r2), {I[0], I[1], I[2]});
    const double value = (8 * I[2] - 6 * I[1] + I[0]) / 3.0;
    const double first_order = 2 * I[2] - I[1];
    const double err = std::fabs(value - first_order) + quad.tolerance * scale;
    return finish(value, err, Method::pv_quadrature, a, "direction", f);
}

CoefficientResult b_coefficient(const Symbol& a, const Region& region, const EntropyFunction& f,
                                const QuadratureSpec& quad) {
    if (region.dimension() != a.dimension()) throw std::invalid_argument("b_coefficient: dimension mismatch");
    const int d = region.dimension();
    if (f.is_affine()) return finish(0.0, 0.0, Method::pv_quadrature, a, region.tag(), f);
    const double pref = boundary_factor(region);
    if (region.shape() == Shape::half_space) {
        auto A = a_functional(a, region.normal(), f, quad);
        return finish(pref * A.value, pref * A.error_estimate, Method::pv_quadrature, a, region.tag(), f);
    }
    if (a.radial()) {
        std::vector<double> e1(d, 0.0);
        e1[0] = 1.0;
        auto A = a_functional(a, e1, f, quad);
        const double area = region.boundary_measure();
        return finish(pref * area * A.value, pref * area * A.error_estimate, Method::pv_quadrature, a,
                      region.tag(), f);
    }
    // 𝓐(a, -e) = 𝓐(a, e) for even symbols, so normals are keyed up to sign.
    const auto nodes = region.boundary_quadrature(d == 2 ? 32 : 12);
    std::map<std::vector<long long>, CoefficientResult> cache;
    double value = 0.0, err = 0.0;
    for (const auto& node : nodes) {
        std::vector<double> n = node.normal;
        for (double v : n) {
            if (std::fabs(v) < 1e-12) continue;
            if (v < 0)
                for (double& w : n) w = -w;
            break;
        }
        std::vector<long long> key;
        for (double v : n) key.push_back(std::llround(v * 1e10));
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, a_functional(a, n, f, quad)).first;
        value += node.weight * it->second.value;
        err += node.weight * it->second.error_estimate;
    }
    return finish(pref * value, pref * err, Method::pv_quadrature, a, region.tag(), f);
}

CoefficientResult b_parseval_quadratic(const Symbol& a, const Region& region, double c, const QuadratureSpec& quad) {
    const int d = a.dimension();
    const auto f = EntropyFunction::quadratic(c);
    if (c == 0.0) return finish(0.0, 0.0, Method::parseval, a, region.tag(), f);
    if (!a.radial()) throw std::invalid_argument("b_parseval_quadratic: Fourier transform available for radial symbols only");
    // Extend z_max until |â|² z^d has decayed.
    double zmax = 8.0;
    for (;;) {
        const KernelTransform kt(a, zmax, quad);
        const double peak = std::fabs(kt(0.0));
        double edge = 0.0;
        for (double z = 0.5 * zmax; z <= zmax; z += zmax / 64) edge = std::max(edge, std::fabs(kt(z)) * std::pow(z, 0.5 * d));
        if (edge <= 1e-9 * peak) break;
        zmax *= 2.0;
        if (zmax > 4096) throw NumericalError("b_parseval_quadratic: transform does not decay", edge / peak);
    }
    const KernelTransform kt(a, zmax, quad);
    const double ft = std::pow(2 * kPi, d);  // â = (2π)^d ǎ
    auto integrand = [&](double z) {
        const double v = ft * kt(z);
        return v * v * std::pow(z, d);
    };
    double err = 0.0;
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, zmax, 15, 1e-12, &err);
    const double cd = d == 2 ? 4.0 : 2 * kPi;  // ∫_{S^{d-1}} |ω·e| dω
    const double A = -c / (8 * kPi * kPi) * std::pow(2 * kPi, 1 - d) * cd * I;
    const double Aerr = std::fabs(c) / (8 * kPi * kPi) * std::pow(2 * kPi, 1 - d) * cd * err;
    const double pref = boundary_factor(region);
    const double area = region.shape() == Shape::half_space ? 1.0 : region.boundary_measure();
    return finish(pref * area * A, pref * area * Aerr, Method::parseval, a, region.tag(), f);
}

CoefficientResult sigma_series(int d, double tol) {
    if (d < 2 || d > 4) throw std::invalid_argument("sigma_series: d must be 2, 3 or 4");
    if (!(tol > 0.0)) throw std::invalid_argument("sigma_series: tolerance must be positive");
    const double s = 0.5 * (d + 1);
    // Anti-diagonal N = n + m carries (-1)^N c_N N^{-s}, c_N = Σ_n (n(N-n))^{-1/2}.
    auto term = [&](int k) {
        const int N = k + 2;
        double c = 0.0;
        for (int n = 1; n < N; ++n) c += 1.0 / std::sqrt(static_cast<double>(n) * (N - n));
        return c * std::pow(N, -s);
    };
    // Cohen–Rodriguez Villegas–Zagier acceleration of Σ (-1)^k a_k.
    auto cvz = [&](int n) {
        double dd = std::pow(3.0 + std::sqrt(8.0), n);
        dd = 0.5 * (dd + 1.0 / dd);
        double b = -1.0, c = -dd, sum = 0.0;
        for (int k = 0; k < n; ++k) {
            c = b - c;
            sum += c * term(k);
            b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
        }
        return sum / dd;
    };
    std::vector<double> history;
    double prev = cvz(10);
    history.push_back(prev);
    for (int n = 20; n <= 200; n += 10) {
        const double cur = cvz(n);
        history.push_back(cur);
        if (std::fabs(cur - prev) <= tol) {
            CoefficientResult r;
            r.value = cur;
            r.error_estimate = std::fabs(cur - prev);
            r.method = Method::series;
            r.symbol_tag = "sigma(d=" + std::to_string(d) + ")";
            r.region_tag = "none";
            r.f_tag = "none";
            return r;
        }
        prev = cur;
    }
    throw NumericalError("sigma_series: acceleration did not reach tolerance", std::fabs(history.back() - history[history.size() - 2]),
                         history);
}

CoefficientResult b_closed_form_gaussian(double gamma, int d, double boundary_area) {
    if (!(gamma > 2.0)) throw std::invalid_argument("b_closed_form_gaussian: gamma must exceed 2");
    const double ratio = std::isinf(gamma) ? 1.0 : gamma / (gamma - 1.0);
    CoefficientResult r;
    r.value = -ratio * std::pow(2.0, -d - 3) * std::pow(kPi, -0.5 * (d + 1)) * boundary_area;
    r.method = Method::closed_form;
    r.symbol_tag = "boltzmann(|xi|^2/2)";
    r.region_tag = "area=" + std::to_string(boundary_area);
    r.f_tag = "effective(" + std::to_string(gamma) + ")";
    r.note = "closed form; compared against quadrature, not trusted";
    return r;
}

CoefficientResult b_eta_infinity_gaussian(int d, double boundary_area, double tol) {
    const auto sigma = sigma_series(d, tol);
    const double pref = -0.5 * std::pow(2 * kPi, -0.5 * (d + 1)) * boundary_area;
    CoefficientResult r;
    r.value = pref * sigma.value;
    r.error_estimate = std::fabs(pref) * sigma.error_estimate;
    r.method = Method::closed_form;
    r.symbol_tag = "limit_fermi(|xi|^2/2)";
    r.region_tag = "area=" + std::to_string(boundary_area);
    r.f_tag = "neg_log1m";
    return r;
}

std::vector<ContinuityRow> continuity_scan(const std::function<Symbol(double)>& family, const Region& region,
                                           const EntropyFunction& f, const std::vector<double>& lambdas,
                                           const QuadratureSpec& quad) {
    const auto ref = b_coefficient(family(0.0), region, f, quad);
    std::vector<ContinuityRow> rows;
    for (double l : lambdas) {
        auto r = b_coefficient(family(l), region, f, quad);
        rows.push_back({l, r, std::fabs(r.value - ref.value)});
    }
    return rows;
}

}  // namespace fent
