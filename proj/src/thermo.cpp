#include "fent/thermo.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fent/errors.hpp"

namespace fent {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

void check_dimension(int d) {
    if (d < 2 || d > 3) throw std::invalid_argument("dimension must be 2 or 3, got " + std::to_string(d));
}

// 1/(1+e^x) without overflow.
double fermi_function(double x) {
    if (x > 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

// 1/(φ + ω e^y) without overflow.
double model_function(double phi, double omega, double y) {
    if (y > 0.0) {
        const double e = std::exp(-y);
        return e / (phi * e + omega);
    }
    return 1.0 / (phi + omega * std::exp(y));
}

// Unit directions used to probe non-radial functions.
std::vector<std::vector<double>> probe_directions(int d) {
    std::vector<std::vector<double>> dirs;
    if (d == 2) {
        for (int k = 0; k < 16; ++k) {
            const double th = 2 * kPi * k / 16;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        const double s = 1.0 / std::sqrt(3.0), q = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < 3; ++i)
            for (double sign : {-1.0, 1.0}) {
                std::vector<double> e(3, 0.0);
                e[i] = sign;
                dirs.push_back(e);
            }
        for (double a : {-s, s})
            for (double b : {-s, s})
                for (double c : {-s, s}) dirs.push_back({a, b, c});
        for (int i = 0; i < 3; ++i)
            for (double a : {-q, q})
                for (double b : {-q, q}) {
                    std::vector<double> e(3, 0.0);
                    e[i] = a;
                    e[(i + 1) % 3] = b;
                    dirs.push_back(e);
                }
    }
    return dirs;
}

}  // namespace

double norm(Point x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }
double ball_volume(int d) { return sphere_area(d) / d; }

// ---------------------------------------------------------------------------

Hamiltonian Hamiltonian::radial(int d, int m, double nu, std::function<double(double)> profile,
                                std::function<double(double)> limit_profile, std::string tag) {
    check_dimension(d);
    if (m < 1) throw std::invalid_argument("Hamiltonian: m must be a positive integer");
    if (!(nu > 0.0)) throw std::invalid_argument("Hamiltonian: ν must be positive");
    Hamiltonian h;
    h.d_ = d;
    h.m_ = m;
    h.nu_ = nu;
    h.radial_ = true;
    h.tag_ = std::move(tag);
    h.profile_ = std::make_shared<const std::function<double(double)>>(std::move(profile));
    h.limit_profile_ = std::make_shared<const std::function<double(double)>>(std::move(limit_profile));
    return h;
}

Hamiltonian Hamiltonian::custom(int d, int m, double nu, std::function<double(Point)> fn,
                                std::function<double(Point)> limit, std::string tag) {
    check_dimension(d);
    if (m < 1) throw std::invalid_argument("Hamiltonian: m must be a positive integer");
    if (!(nu > 0.0)) throw std::invalid_argument("Hamiltonian: ν must be positive");
    Hamiltonian h;
    h.d_ = d;
    h.m_ = m;
    h.nu_ = nu;
    h.radial_ = false;
    h.tag_ = std::move(tag);
    h.h_ = std::make_shared<const std::function<double(Point)>>(std::move(fn));
    h.limit_ = std::make_shared<const std::function<double(Point)>>(std::move(limit));
    return h;
}

Hamiltonian Hamiltonian::quadratic(int d) {
    auto p = [](double r) { return 0.5 * r * r; };
    return radial(d, 1, 0.25, p, p, "quadratic");
}

Hamiltonian Hamiltonian::scaled_quadratic(int d, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("scaled_quadratic: c must be positive");
    auto p = [c](double r) { return c * r * r; };
    return radial(d, 1, 0.5 * c, p, p, "scaled_quadratic(" + fmt(c) + ")");
}

Hamiltonian Hamiltonian::quartic(int d) {
    auto p = [](double r) { return r * r * r * r; };
    return radial(d, 2, 0.5, p, p, "quartic");
}

Hamiltonian Hamiltonian::perturbed_quadratic(int d) {
    return radial(
        d, 1, 0.25, [](double r) { return 0.5 * r * r + 1.0 / (1.0 + r * r); }, [](double r) { return 0.5 * r * r; },
        "perturbed_quadratic");
}

double Hamiltonian::operator()(Point xi) const {
    if (static_cast<int>(xi.size()) != d_) throw std::invalid_argument("Hamiltonian: dimension mismatch");
    return radial_ ? (*profile_)(norm(xi)) : (*h_)(xi);
}

double Hamiltonian::limit(Point xi) const {
    if (static_cast<int>(xi.size()) != d_) throw std::invalid_argument("Hamiltonian: dimension mismatch");
    return radial_ ? (*limit_profile_)(norm(xi)) : (*limit_)(xi);
}

double Hamiltonian::radial_value(double r) const {
    if (!radial_) throw std::logic_error("Hamiltonian::radial_value on a non-radial Hamiltonian");
    return (*profile_)(r);
}

double Hamiltonian::radial_limit(double r) const {
    if (!radial_) throw std::logic_error("Hamiltonian::radial_limit on a non-radial Hamiltonian");
    return (*limit_profile_)(r);
}

Hamiltonian Hamiltonian::limit_hamiltonian() const {
    Hamiltonian h = *this;
    h.tag_ = tag_ + "_limit";
    if (radial_) h.profile_ = limit_profile_;
    else h.h_ = limit_;
    return h;
}

Hamiltonian parse_hamiltonian(const std::string& tag, int d) {
    if (tag == "quadratic") return Hamiltonian::quadratic(d);
    if (tag == "quartic") return Hamiltonian::quartic(d);
    if (tag == "perturbed" || tag == "perturbed_quadratic") return Hamiltonian::perturbed_quadratic(d);
    if (tag.rfind("scaled:", 0) == 0) return Hamiltonian::scaled_quadratic(d, std::stod(tag.substr(7)));
    throw std::invalid_argument("unknown Hamiltonian tag '" + tag + "'");
}

// ---------------------------------------------------------------------------

Symbol Symbol::fermi(const Hamiltonian& h, double T, double mu) {
    if (!(T > 0.0)) throw std::invalid_argument("fermi symbol: T must be positive");
    Symbol a;
    a.kind_ = SymbolKind::fermi;
    a.d_ = h.dimension();
    a.radial_ = h.radial();
    a.tag_ = "fermi(" + h.tag() + ",T=" + fmt(T) + ",mu=" + fmt(mu) + ")";
    if (h.radial())
        a.profile_ = std::make_shared<const std::function<double(double)>>(
            [h, T, mu](double r) { return fermi_function((h.radial_value(r) - mu) / T); });
    else
        a.eval_ = std::make_shared<const std::function<double(Point)>>(
            [h, T, mu](Point x) { return fermi_function((h(x) - mu) / T); });
    return a;
}

Symbol Symbol::model(const Hamiltonian& h, double phi, double omega, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("model symbol: T must be positive");
    if (!(phi >= 0.0)) throw std::invalid_argument("model symbol: φ must be nonnegative");
    if (!(omega > 0.0)) throw std::invalid_argument("model symbol: ω must be positive");
    Symbol a;
    a.kind_ = SymbolKind::model;
    a.d_ = h.dimension();
    a.radial_ = h.radial();
    a.tag_ = "model(" + h.tag() + ",phi=" + fmt(phi) + ",omega=" + fmt(omega) + ",T=" + fmt(T) + ")";
    if (h.radial())
        a.profile_ = std::make_shared<const std::function<double(double)>>(
            [h, phi, omega, T](double r) { return model_function(phi, omega, h.radial_value(r) / T); });
    else
        a.eval_ = std::make_shared<const std::function<double(Point)>>(
            [h, phi, omega, T](Point x) { return model_function(phi, omega, h(x) / T); });
    return a;
}

Symbol Symbol::limit_fermi(const Hamiltonian& h) {
    Symbol a = model(h.limit_hamiltonian(), 1.0, 1.0, 1.0);
    a.kind_ = SymbolKind::limit_fermi;
    a.tag_ = "limit_fermi(" + h.tag() + ")";
    return a;
}

Symbol Symbol::boltzmann(const Hamiltonian& h) {
    const Hamiltonian hl = h.limit_hamiltonian();
    Symbol a;
    a.kind_ = SymbolKind::boltzmann;
    a.d_ = h.dimension();
    a.radial_ = h.radial();
    a.tag_ = "boltzmann(" + h.tag() + ")";
    if (h.radial())
        a.profile_ =
            std::make_shared<const std::function<double(double)>>([hl](double r) { return std::exp(-hl.radial_value(r)); });
    else
        a.eval_ = std::make_shared<const std::function<double(Point)>>([hl](Point x) { return std::exp(-hl(x)); });
    return a;
}

Symbol Symbol::gaussian(int d, double scale) {
    check_dimension(d);
    if (!(scale > 0.0)) throw std::invalid_argument("gaussian symbol: scale must be positive");
    Symbol a;
    a.kind_ = SymbolKind::gaussian;
    a.d_ = d;
    a.radial_ = true;
    a.tag_ = scale == 1.0 ? "gaussian" : "gaussian(" + fmt(scale) + ")";
    const double c = 0.5 / (scale * scale);
    a.profile_ = std::make_shared<const std::function<double(double)>>([c](double r) { return std::exp(-c * r * r); });
    return a;
}

Symbol Symbol::custom(int d, std::function<double(Point)> fn, bool even, std::string tag) {
    check_dimension(d);
    Symbol a;
    a.kind_ = SymbolKind::custom;
    a.d_ = d;
    a.radial_ = false;
    a.even_ = even;
    a.tag_ = std::move(tag);
    a.decay_ = "declared";
    a.eval_ = std::make_shared<const std::function<double(Point)>>(std::move(fn));
    return a;
}

Symbol Symbol::custom_radial(int d, std::function<double(double)> profile, std::string tag) {
    check_dimension(d);
    Symbol a;
    a.kind_ = SymbolKind::custom;
    a.d_ = d;
    a.radial_ = true;
    a.tag_ = std::move(tag);
    a.decay_ = "declared";
    a.profile_ = std::make_shared<const std::function<double(double)>>(std::move(profile));
    return a;
}

Symbol Symbol::dilated(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("Symbol::dilated: factor must be positive");
    Symbol a = *this;
    a.tag_ = tag_ + "∘" + fmt(c);
    if (radial_) {
        auto p = profile_;
        a.profile_ = std::make_shared<const std::function<double(double)>>([p, c](double r) { return (*p)(c * r); });
    } else {
        auto e = eval_;
        a.eval_ = std::make_shared<const std::function<double(Point)>>([e, c](Point x) {
            double buf[3];
            for (std::size_t i = 0; i < x.size(); ++i) buf[i] = c * x[i];
            return (*e)(Point(buf, x.size()));
        });
    }
    return a;
}

Symbol Symbol::scaled(double lambda) const {
    Symbol a = *this;
    a.tag_ = fmt(lambda) + "·" + tag_;
    if (radial_) {
        auto p = profile_;
        a.profile_ =
            std::make_shared<const std::function<double(double)>>([p, lambda](double r) { return lambda * (*p)(r); });
    } else {
        auto e = eval_;
        a.eval_ = std::make_shared<const std::function<double(Point)>>([e, lambda](Point x) { return lambda * (*e)(x); });
    }
    return a;
}

double Symbol::operator()(Point xi) const {
    if (static_cast<int>(xi.size()) != d_) throw std::invalid_argument("Symbol: dimension mismatch");
    return radial_ ? (*profile_)(norm(xi)) : (*eval_)(xi);
}

double Symbol::radial_value(double r) const {
    if (!radial_) throw std::logic_error("Symbol::radial_value on a non-radial symbol " + tag_);
    return (*profile_)(r);
}

namespace {

// Samples |a| along a ray; returns (max, last radius above threshold·max).
struct RayScan {
    double max = 0.0;
    double last_above = 0.0;
};

template <class F>
RayScan scan_ray(const F& value, double threshold) {
    std::vector<double> rs{0.0};
    for (double r = 0.02; r < 1e5; r *= 1.05) rs.push_back(r);
    std::vector<double> vs(rs.size());
    RayScan s;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        vs[i] = std::fabs(value(rs[i]));
        s.max = std::max(s.max, vs[i]);
    }
    if (s.max == 0.0) return s;
    std::size_t last = 0;
    for (std::size_t i = 0; i < rs.size(); ++i)
        if (vs[i] > threshold * s.max) last = i;
    if (last + 1 >= rs.size()) throw NumericalError("symbol does not decay below the threshold within |ξ| < 1e5");
    double lo = rs[last], hi = rs[last + 1];
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::fabs(value(mid)) > threshold * s.max) lo = mid;
        else hi = mid;
    }
    s.last_above = hi;
    return s;
}

}  // namespace

double Symbol::max_abs() const {
    if (radial_) return scan_ray([&](double r) { return (*profile_)(r); }, 1e-300).max;
    double m = 0.0;
    std::vector<double> x(d_);
    for (const auto& e : probe_directions(d_))
        m = std::max(m, scan_ray(
                            [&](double r) {
                                for (int i = 0; i < d_; ++i) x[i] = r * e[i];
                                return (*eval_)(x);
                            },
                            1e-300)
                            .max);
    return m;
}

double Symbol::decay_radius(double threshold) const {
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("decay_radius: threshold must lie in (0,1)");
    if (radial_) return scan_ray([&](double r) { return (*profile_)(r); }, threshold).last_above;
    const double m = max_abs();
    double R = 0.0;
    std::vector<double> x(d_);
    for (const auto& e : probe_directions(d_)) {
        auto ray = [&](double r) {
            for (int i = 0; i < d_; ++i) x[i] = r * e[i];
            return (*eval_)(x);
        };
        RayScan s = scan_ray(ray, 1e-300);
        // Rescale the per-ray threshold to the global maximum.
        if (s.max > 0.0) R = std::max(R, scan_ray(ray, std::min(0.5, threshold * m / s.max)).last_above);
    }
    return R;
}

// ---------------------------------------------------------------------------

double symbol_integral(const Symbol& a, const std::function<double(double)>& g, const QuadratureSpec& quad) {
    quad.validate();
    const int d = a.dimension();
    const double norm_d = std::pow(2 * kPi, -d);
    double R = quad.xi_radius > 0.0 ? quad.xi_radius : a.decay_radius(1e-2 * quad.support_threshold);
    if (R == 0.0) return 0.0;
    const double rel = quad.tolerance;
    if (a.radial()) {
        auto f = [&](double r) { return g(a.radial_value(r)) * std::pow(r, d - 1); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        // g may amplify the tail (η_γ(a) ~ a^γ), so the radius grows until the
        // next shell is negligible.
        for (int grow = 0;; ++grow, R *= 2.0) {
            double err = 0.0, L1 = 0.0;
            const double I = GK::integrate(f, 0.0, R, 20, 0.1 * rel, &err, &L1);
            double err2 = 0.0;
            const double tail = GK::integrate(f, R, 2 * R, 20, 0.1 * rel, &err2);
            const double scale = std::max(std::fabs(I), 1e-300);
            if (err > rel * std::max(scale, 1e-3 * L1))
                throw NumericalError("symbol_integral: radial quadrature did not converge for " + a.tag(), err / scale);
            if (std::fabs(tail) <= rel * scale + 1e-300) return norm_d * sphere_area(d) * (I + tail);
            if (quad.xi_radius > 0.0 || grow == 6)
                throw NumericalError("symbol_integral: truncation radius too small for " + a.tag(),
                                     std::fabs(tail) / scale);
        }
    }
    // Tensor Gauss–Legendre, panel count doubled until two levels agree.
    auto tensor = [&](int panels) {
        const Rule r = composite_gauss_legendre(16, panels, -R, R);
        const std::size_t n = r.size();
        double sum = 0.0;
        std::vector<double> x(d);
        if (d == 2) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    x[0] = r.x[i];
                    x[1] = r.x[j];
                    sum += r.w[i] * r.w[j] * g(a(x));
                }
        } else {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t k = 0; k < n; ++k) {
                        x[0] = r.x[i];
                        x[1] = r.x[j];
                        x[2] = r.x[k];
                        sum += r.w[i] * r.w[j] * r.w[k] * g(a(x));
                    }
        }
        return sum;
    };
    const int max_panels = d == 2 ? 64 : 8;
    double prev = tensor(2);
    for (int p = 4; p <= max_panels; p *= 2) {
        const double cur = tensor(p);
        if (std::fabs(cur - prev) <= rel * std::fabs(cur) + 1e-300) return norm_d * cur;
        prev = cur;
    }
    throw NumericalError("symbol_integral: tensor quadrature did not converge for " + a.tag(), 0.0, {prev});
}

double particle_density(const Hamiltonian& h, double T, double mu, const QuadratureSpec& quad) {
    if (!(T > 0.0)) throw std::invalid_argument("particle_density: T must be positive");
    return symbol_integral(Symbol::fermi(h, T, mu), [](double x) { return x; }, quad);
}

double entropy_density(const Hamiltonian& h, double T, double mu, double gamma, const QuadratureSpec& quad) {
    if (!(T > 0.0)) throw std::invalid_argument("entropy_density: T must be positive");
    const EntropyFunction f = EntropyFunction::renyi(gamma);
    return symbol_integral(Symbol::fermi(h, T, mu), [&](double x) { return f(x); }, quad);
}

namespace {

// Measure ∫_{h(rω)<level} r^{d-1} dr along one ray.
double ray_sublevel_moment(const std::function<double(double)>& h, double level, int d) {
    double rmax = 1.0;
    while (h(rmax) < level) {
        rmax *= 2.0;
        if (rmax > 1e6) throw std::invalid_argument("integrated_dos: sub-level set is unbounded");
    }
    // Past rmax the catalog Hamiltonians are increasing; extend once for safety.
    rmax *= 2.0;
    const int n = 4000;
    double moment = 0.0;
    double prev_r = 0.0;
    bool prev_in = h(0.0) < level;
    double start = prev_in ? 0.0 : -1.0;
    for (int i = 1; i <= n; ++i) {
        const double r = rmax * i / n;
        const bool in = h(r) < level;
        if (in != prev_in) {
            double lo = prev_r, hi = r;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((h(mid) < level) == prev_in) lo = mid;
                else hi = mid;
            }
            const double edge = 0.5 * (lo + hi);
            if (in) start = edge;
            else moment += (std::pow(edge, d) - std::pow(start, d)) / d;
        }
        prev_r = r;
        prev_in = in;
    }
    if (prev_in) throw std::invalid_argument("integrated_dos: sub-level set is unbounded");
    return moment;
}

}  // namespace

double integrated_dos(const Hamiltonian& h, double T_level) {
    if (!(T_level > 0.0)) throw std::invalid_argument("integrated_dos: level must be positive");
    const int d = h.dimension();
    const double norm_d = std::pow(2 * kPi, -d);
    if (h.radial())
        return norm_d * sphere_area(d) *
               ray_sublevel_moment([&](double r) { return h.radial_value(r); }, T_level, d);
    std::vector<double> x(d);
    double total = 0.0;
    if (d == 2) {
        const int n = 256;
        for (int k = 0; k < n; ++k) {
            const double th = 2 * kPi * k / n;
            total += (2 * kPi / n) * ray_sublevel_moment(
                                         [&](double r) {
                                             x[0] = r * std::cos(th);
                                             x[1] = r * std::sin(th);
                                             return h(x);
                                         },
                                         T_level, d);
        }
    } else {
        const Rule c = gauss_legendre(48, -1.0, 1.0);
        const int nphi = 96;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double st = std::sqrt(1.0 - c.x[i] * c.x[i]);
            for (int k = 0; k < nphi; ++k) {
                const double ph = 2 * kPi * k / nphi;
                total += c.w[i] * (2 * kPi / nphi) *
                         ray_sublevel_moment(
                             [&](double r) {
                                 x[0] = r * st * std::cos(ph);
                                 x[1] = r * st * std::sin(ph);
                                 x[2] = r * c.x[i];
                                 return h(x);
                             },
                             T_level, d);
            }
        }
    }
    return norm_d * total;
}

double kappa(const Hamiltonian& h_inf, const QuadratureSpec& quad) {
    return symbol_integral(Symbol::boltzmann(h_inf), [](double x) { return x; }, quad);
}

double lambda_T(double rho, double T, const Hamiltonian& h_inf, const QuadratureSpec& quad) {
    if (!(rho > 0.0) || !(T > 0.0)) throw std::invalid_argument("lambda_T: ρ and T must be positive");
    const double d = h_inf.dimension(), m = h_inf.degree_half();
    return rho * std::pow(T, -d / (2 * m)) / kappa(h_inf, quad);
}

MuSolution solve_mu(const Hamiltonian& h, double T, double rho, double tol, const QuadratureSpec& quad) {
    if (!(rho > 0.0)) throw std::invalid_argument("solve_mu: ρ must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("solve_mu: T must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_mu: tol must be positive");
    auto F = [&](double mu) { return particle_density(h, T, mu, quad) - rho; };
    const double limit = 1e6 * std::max(1.0, T);
    double lo = -50.0 * T, hi = 50.0 * T;
    double flo = F(lo), fhi = F(hi);
    while (flo > 0.0) {
        hi = lo;
        fhi = flo;
        lo *= 2.0;
        if (-lo > limit) throw NumericalError("solve_mu: no lower bracket within the search range", flo);
        flo = F(lo);
    }
    while (fhi < 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > limit) throw NumericalError("solve_mu: no upper bracket within the search range", fhi);
        fhi = F(hi);
    }
    std::uintmax_t iters = 200;
    auto bracket = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(50), iters);
    const double mu = 0.5 * (bracket.first + bracket.second);
    const double dens = particle_density(h, T, mu, quad);
    const double residual = std::fabs(dens - rho);
    if (residual > tol)
        throw NumericalError("solve_mu: residual " + fmt(residual) + " exceeds tolerance", residual,
                             {bracket.first, bracket.second});
    const double lam = lambda_T(rho, T, h.limit_hamiltonian(), quad);
    return {mu, dens, residual, lam, std::exp(-mu / T) * lam};
}

}  // namespace fent
