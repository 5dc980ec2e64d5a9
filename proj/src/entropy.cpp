#include "fent/entropy.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fent/errors.hpp"

namespace fent {

namespace {

constexpr double kTiny = 1e-300;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

double von_neumann_pair(double m) {
    if (m < kTiny) return 0.0;
    return -m * std::log(m) - (1.0 - m) * std::log1p(-m);
}

double von_neumann_value(double t) {
    if (!(t > 0.0) || !(t < 1.0)) return 0.0;
    return von_neumann_pair(t <= 0.5 ? t : 1.0 - t);
}

// ln(t^γ + (1-t)^γ) with the larger term factored out.
double log_moment(double gamma, double m) {
    const double r = m / (1.0 - m);
    return gamma * std::log1p(-m) + std::log1p(std::pow(r, gamma));
}

double eta_infinity_value(double t) {
    if (!(t > 0.0) || !(t < 1.0)) return 0.0;
    return t <= 0.5 ? -std::log1p(-t) : -std::log(t);
}

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

double power_derivative(double M, double delta, double t, int k) {
    const double a = std::fabs(t);
    switch (k) {
        case 0: return M * std::pow(a, delta);
        case 1: return a == 0.0 ? (delta > 1 ? 0.0 : std::numeric_limits<double>::infinity())
                                : M * delta * std::pow(a, delta - 1.0) * sgn(t);
        default:
            if (a == 0.0) return delta == 2.0 ? 2.0 * M : (delta > 2 ? 0.0 : std::numeric_limits<double>::infinity());
            return M * delta * (delta - 1.0) * std::pow(a, delta - 2.0);
    }
}

double eta_log_derivative(double t, int k) {
    const double a = std::fabs(t);
    switch (k) {
        case 0: return a < kTiny ? 0.0 : -t * std::log(a);
        case 1: return -(std::log(a) + 1.0);
        default: return -1.0 / t;
    }
}

double finite_difference(const std::function<double(double)>& f, double t, int k) {
    if (k == 0) return f(t);
    if (k == 1) {
        const double h = 6e-6 * std::max(1.0, std::fabs(t));
        return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
    }
    const double h = 1e-4 * std::max(1.0, std::fabs(t));
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h);
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("entropy function: γ must be a positive finite number, got " + fmt(gamma));
}

}  // namespace

double snap_gamma(double gamma) {
    if (std::fabs(gamma - 1.0) <= kRegimeSnap) return 1.0;
    if (std::fabs(gamma - 2.0) <= kRegimeSnap) return 2.0;
    return gamma;
}

double eta(double gamma, double t) {
    if (std::fabs(gamma - 1.0) <= kRegimeSnap) return von_neumann_value(t);
    if (!(t > 0.0) || !(t < 1.0)) return 0.0;
    const double m = t <= 0.5 ? t : 1.0 - t;
    if (m < kTiny) return 0.0;
    return log_moment(gamma, m) / (1.0 - gamma);
}

double eta_derivative(double gamma, double t, int k) {
    if (k == 0) return eta(gamma, t);
    if (!(t > 0.0) || !(t < 1.0)) return 0.0;
    const double s = 1.0 - t;
    if (std::fabs(gamma - 1.0) <= kRegimeSnap) return k == 1 ? std::log1p(-t) - std::log(t) : -1.0 / (t * s);
    const double A = std::pow(t, gamma - 1.0);
    const double B = std::pow(s, gamma - 1.0);
    const double g = t * A + s * B;
    if (k == 1) return gamma * (A - B) / ((1.0 - gamma) * g);
    const double d = A - B;
    return (-gamma * std::pow(t * s, gamma - 2.0) - gamma / (1.0 - gamma) * d * d) / (g * g);
}

double second_derivative_eta(double gamma, double t) {
    check_gamma(gamma);
    if (!(t > 0.0) || !(t < 1.0))
        throw std::invalid_argument("second_derivative_eta: t must lie strictly inside (0,1)");
    return eta_derivative(gamma, t, 2);
}

double linear_shift(double gamma) {
    gamma = snap_gamma(gamma);
    if (gamma < 1.0) return 0.0;
    if (gamma == 1.0) return 1.0;
    return gamma / (gamma - 1.0);
}

// ---------------------------------------------------------------------------

EntropyFunction EntropyFunction::renyi(double gamma) {
    check_gamma(gamma);
    EntropyFunction f;
    f.kind_ = EntropyKind::renyi;
    f.gamma_ = gamma;
    f.singular_ = {0.0, 1.0};
    f.hoelder_ = 0.99 * std::min(1.0, gamma);
    f.tag_ = "renyi(" + fmt(gamma) + ")";
    return f;
}

EntropyFunction EntropyFunction::von_neumann() {
    EntropyFunction f = renyi(1.0);
    f.kind_ = EntropyKind::von_neumann;
    f.tag_ = "von_neumann";
    return f;
}

EntropyFunction EntropyFunction::eta_log() {
    EntropyFunction f;
    f.kind_ = EntropyKind::eta_log;
    f.gamma_ = 1.0;
    f.singular_ = {0.0};
    f.hoelder_ = 0.99;
    f.tag_ = "eta_log";
    return f;
}

EntropyFunction EntropyFunction::power(double M, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("power: δ must be positive");
    EntropyFunction f;
    f.kind_ = EntropyKind::power;
    f.M_ = M;
    f.delta_ = delta;
    f.singular_ = {0.0};
    f.hoelder_ = std::min(1.0, delta);
    f.tag_ = "power(" + fmt(M) + "," + fmt(delta) + ")";
    return f;
}

EntropyFunction EntropyFunction::effective(double gamma) {
    check_gamma(gamma);
    const double g = snap_gamma(gamma);
    EntropyFunction f;
    f.kind_ = EntropyKind::effective;
    f.gamma_ = g;
    f.singular_ = {0.0};
    if (g == 1.0) {
        f.eff_log_ = true;
        f.hoelder_ = 0.99;
    } else if (g < 2.0) {
        f.M_ = 1.0 / (1.0 - g);
        f.delta_ = g;
        f.hoelder_ = std::min(1.0, g);
    } else if (g == 2.0) {
        f.M_ = -4.0 / 3.0;
        f.delta_ = 3.0;
    } else {
        f.M_ = g / (2.0 * (g - 1.0));
        f.delta_ = 2.0;
    }
    f.tag_ = "effective(" + fmt(g) + ")";
    return f;
}

EntropyFunction EntropyFunction::linear_shifted(double gamma) {
    check_gamma(gamma);
    EntropyFunction f = renyi(snap_gamma(gamma));
    f.kind_ = EntropyKind::linear_shifted;
    f.shift_ = linear_shift(gamma);
    f.tag_ = "linear_shifted(" + fmt(f.gamma_) + ")";
    return f;
}

EntropyFunction EntropyFunction::eta_infinity() {
    EntropyFunction f;
    f.kind_ = EntropyKind::eta_infinity;
    f.gamma_ = std::numeric_limits<double>::infinity();
    f.singular_ = {0.0, 0.5, 1.0};
    f.hoelder_ = 1.0;
    f.tag_ = "eta_infinity";
    return f;
}

EntropyFunction EntropyFunction::affine(double slope, double intercept) {
    EntropyFunction f;
    f.kind_ = EntropyKind::affine;
    f.M_ = slope;
    f.delta_ = intercept;
    f.hoelder_ = 1.0;
    f.tag_ = "affine(" + fmt(slope) + "," + fmt(intercept) + ")";
    return f;
}

EntropyFunction EntropyFunction::log() {
    EntropyFunction f;
    f.kind_ = EntropyKind::log;
    f.singular_ = {0.0};
    f.hoelder_ = 1.0;
    f.tag_ = "log";
    return f;
}

EntropyFunction EntropyFunction::neg_log1m() {
    EntropyFunction f;
    f.kind_ = EntropyKind::neg_log1m;
    f.singular_ = {1.0};
    f.hoelder_ = 1.0;
    f.tag_ = "neg_log1m";
    return f;
}

EntropyFunction EntropyFunction::custom(std::function<double(double)> fn, std::vector<double> singular_set,
                                        double hoelder_exponent, std::string tag) {
    if (!fn) throw std::invalid_argument("custom entropy function: empty callable");
    if (!(hoelder_exponent > 0.0)) throw std::invalid_argument("custom entropy function: δ must be positive");
    EntropyFunction f;
    f.kind_ = EntropyKind::custom;
    f.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
    f.singular_ = std::move(singular_set);
    f.hoelder_ = hoelder_exponent;
    f.tag_ = tag.empty() ? "custom" : std::move(tag);
    return f;
}

double EntropyFunction::operator()(double t) const { return derivative(t, 0); }

double EntropyFunction::value(double t, double complement) const {
    if (t <= 0.5 || !(complement > 0.0) || !(complement < 0.5)) return derivative(t, 0);
    // Near t = 1 only the complement carries full precision.
    const double m = complement;
    switch (kind_) {
        case EntropyKind::renyi:
        case EntropyKind::von_neumann:
        case EntropyKind::linear_shifted: {
            double e;
            if (m < kTiny) e = 0.0;
            else if (std::fabs(gamma_ - 1.0) <= kRegimeSnap) e = von_neumann_pair(m);
            else e = log_moment(gamma_, m) / (1.0 - gamma_);
            return kind_ == EntropyKind::linear_shifted ? e - shift_ * t : e;
        }
        case EntropyKind::eta_infinity:
        case EntropyKind::log:
            return std::log1p(-m) * (kind_ == EntropyKind::log ? 1.0 : -1.0);
        case EntropyKind::neg_log1m:
            return -std::log(m);
        default:
            return derivative(t, 0);
    }
}

double EntropyFunction::derivative(double t, int k) const {
    if (k < 0 || k > 2) throw std::invalid_argument("EntropyFunction::derivative: k must be 0, 1 or 2");
    switch (kind_) {
        case EntropyKind::renyi:
        case EntropyKind::von_neumann:
            return eta_derivative(gamma_, t, k);
        case EntropyKind::linear_shifted:
            return eta_derivative(gamma_, t, k) - (k == 0 ? shift_ * t : (k == 1 ? shift_ : 0.0));
        case EntropyKind::eta_log:
            return eta_log_derivative(t, k);
        case EntropyKind::power:
            return power_derivative(M_, delta_, t, k);
        case EntropyKind::effective:
            return eff_log_ ? eta_log_derivative(t, k) : power_derivative(M_, delta_, t, k);
        case EntropyKind::eta_infinity:
            if (k == 0) return eta_infinity_value(t);
            if (!(t > 0.0) || !(t < 1.0)) return 0.0;
            if (t <= 0.5) {
                const double s = 1.0 - t;
                return k == 0 ? -std::log1p(-t) : (k == 1 ? 1.0 / s : 1.0 / (s * s));
            }
            return k == 0 ? -std::log(t) : (k == 1 ? -1.0 / t : 1.0 / (t * t));
        case EntropyKind::affine:
            return k == 0 ? M_ * t + delta_ : (k == 1 ? M_ : 0.0);
        case EntropyKind::log:
            return k == 0 ? std::log(t) : (k == 1 ? 1.0 / t : -1.0 / (t * t));
        case EntropyKind::neg_log1m: {
            const double s = 1.0 - t;
            return k == 0 ? -std::log1p(-t) : (k == 1 ? 1.0 / s : 1.0 / (s * s));
        }
        case EntropyKind::custom:
            return finite_difference(*fn_, t, k);
    }
    return 0.0;
}

std::optional<double> EntropyFunction::quadratic_coefficient() const {
    if ((kind_ == EntropyKind::power || (kind_ == EntropyKind::effective && !eff_log_)) && delta_ == 2.0)
        return M_;
    return std::nullopt;
}

bool EntropyFunction::is_polynomial() const {
    if (kind_ == EntropyKind::affine) return true;
    if (kind_ == EntropyKind::power && delta_ == std::floor(delta_) && std::fmod(delta_, 2.0) == 0.0) return true;
    return false;
}

EntropyFunction parse_entropy_function(const std::string& tag) {
    std::vector<std::string> parts;
    std::stringstream ss(tag);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw std::invalid_argument("empty entropy-function tag");
    const std::string& name = parts[0];
    auto num = [&](std::size_t i) {
        if (i >= parts.size()) throw std::invalid_argument("entropy-function tag '" + tag + "' misses a parameter");
        std::size_t used = 0;
        double v = std::stod(parts[i], &used);
        if (used != parts[i].size()) throw std::invalid_argument("bad number in entropy-function tag '" + tag + "'");
        return v;
    };
    if (name == "quadratic" || name == "t2") return parts.size() > 1 ? EntropyFunction::quadratic(num(1)) : EntropyFunction::quadratic();
    if (name == "linear") return EntropyFunction::affine(1.0, 0.0);
    if (name == "affine") return EntropyFunction::affine(num(1), parts.size() > 2 ? num(2) : 0.0);
    if (name == "renyi" || name == "eta") return EntropyFunction::renyi(num(1));
    if (name == "von_neumann" || name == "eta1") return EntropyFunction::von_neumann();
    if (name == "eta_log") return EntropyFunction::eta_log();
    if (name == "power") return EntropyFunction::power(num(1), num(2));
    if (name == "effective") return EntropyFunction::effective(num(1));
    if (name == "shifted" || name == "linear_shifted") return EntropyFunction::linear_shifted(num(1));
    if (name == "eta_infinity") return EntropyFunction::eta_infinity();
    if (name == "log") return EntropyFunction::log();
    if (name == "neg_log1m") return EntropyFunction::neg_log1m();
    throw std::invalid_argument("unknown entropy-function tag '" + tag + "'");
}

// ---------------------------------------------------------------------------

Table1Row table1(double gamma) {
    check_gamma(gamma);
    const double g = snap_gamma(gamma);
    double delta;
    if (g == 2.0) delta = 3.0;
    else if (g > 2.0) delta = 2.0;
    else delta = g;
    return {delta, EntropyFunction::linear_shifted(g), EntropyFunction::effective(g)};
}

// ---------------------------------------------------------------------------

namespace {

boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule(int levels) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<boost::math::quadrature::tanh_sinh<double>>> rules;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = rules[levels];
    if (!slot) slot = std::make_unique<boost::math::quadrature::tanh_sinh<double>>(levels);
    return *slot;
}

}  // namespace

UFunctional::UFunctional(EntropyFunction f, double tolerance, int max_levels)
    : f_(f), integrand_f_(f), tolerance_(tolerance), max_levels_(max_levels) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("UFunctional: tolerance must be positive");
    if (f.kind() == EntropyKind::linear_shifted) integrand_f_ = EntropyFunction::renyi(f.gamma());
}

bool UFunctional::has_closed_form(double u, double v) const {
    switch (integrand_f_.kind()) {
        case EntropyKind::affine:
        case EntropyKind::log:
        case EntropyKind::neg_log1m:
            return true;
        case EntropyKind::eta_infinity:
            return (u <= 0.5 && v <= 0.5) || (u >= 0.5 && v >= 0.5);
        default:
            return integrand_f_.quadratic_coefficient().has_value() || u == v;
    }
}

double UFunctional::operator()(double u, double v) const { return evaluate(u, v, nullptr); }

double UFunctional::evaluate(double u, double v, double* error) const {
    if (error) *error = 0.0;
    if (u == v) return 0.0;
    switch (integrand_f_.kind()) {
        case EntropyKind::affine:
            return 0.0;
        case EntropyKind::log: {
            const double d = std::log(u) - std::log(v);
            return 0.5 * d * d;
        }
        case EntropyKind::neg_log1m: {
            const double d = std::log1p(-u) - std::log1p(-v);
            return -0.5 * d * d;
        }
        case EntropyKind::eta_infinity:
            if (u >= 0.0 && v >= 0.0 && u <= 0.5 && v <= 0.5) {
                const double d = std::log1p(-u) - std::log1p(-v);
                return -0.5 * d * d;
            }
            if (u >= 0.5 && v >= 0.5 && u <= 1.0 && v <= 1.0) {
                const double d = std::log(u) - std::log(v);
                return -0.5 * d * d;
            }
            break;
        default:
            break;
    }
    if (auto c = integrand_f_.quadratic_coefficient()) {
        const double d = u - v;
        return -(*c) * d * d;
    }
    // Short segments far from the singular set: the integrand is analytic.
    const double m = 0.5 * (u + v), d = u - v, h = std::fabs(d);
    double dist = std::numeric_limits<double>::infinity();
    for (double tau : integrand_f_.singular_set()) dist = std::min(dist, std::fabs(m - tau));
    if (h <= 1e-3 * dist) {
        // U = -½f''(m)d² - f''''(m)d⁴/72 + ...
        const double value = -0.5 * integrand_f_.derivative(m, 2) * d * d;
        if (error) *error = std::fabs(value) * (h / dist) * (h / dist);
        return value;
    }
    if (h <= 0.25 * dist) return gauss(u, v);
    return quadrature(u, v, error);
}

double UFunctional::gauss(double u, double v) const {
    static const Rule rule = gauss_legendre(24, 0.0, 1.0);
    const EntropyFunction& f = integrand_f_;
    const double fu = f(u), fv = f(v), du = u - v;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double t = rule.x[i], s = 1.0 - t;
        const double num = t < 0.5 ? (f(v + t * du) - fv) - t * (fu - fv) : (f(u - s * du) - fu) - s * (fv - fu);
        sum += rule.w[i] * num / (t * s);
    }
    return sum;
}

double UFunctional::piece(double u, double v, double a, double b, double* error, double* L1) const {
    const EntropyFunction& f = integrand_f_;
    const double fu = f.value(u, 1.0 - u), fv = f.value(v, 1.0 - v);
    const double du = u - v;
    // Second argument: signed distance to the nearer end of [a,b].
    auto integrand = [&](double x, double xc) {
        double t = x, s = 1.0 - x;
        if (b == 1.0 && xc > 0.0) s = xc;
        if (a == 0.0 && xc < 0.0) t = -xc;
        double num;
        if (t < 0.5) {
            const double w = v + t * du, wc = (1.0 - v) - t * du;
            num = (f.value(w, wc) - fv) - t * (fu - fv);
        } else {
            const double w = u - s * du, wc = (1.0 - u) + s * du;
            num = (f.value(w, wc) - fu) - s * (fv - fu);
        }
        return num / (t * s);
    };
    // tanh-sinh stops on err ≤ 1e-9·L1. When U is tiny, roundoff keeps that
    // relative test from ever firing although the absolute tolerance is long
    // met, so a constant offset lifts L1 to an absolute floor of 0.1·tolerance.
    const double lift = 1e8 * tolerance_;
    const double offset = lift / (b - a);
    auto shifted = [&](double x, double xc) { return integrand(x, xc) + offset; };
    std::size_t levels = 0;
    const double total = tanh_sinh_rule(max_levels_).integrate(shifted, a, b, 1e-9, error, L1, &levels);
    *L1 = std::max(0.0, *L1 - lift);
    return total - lift;
}

double UFunctional::quadrature(double u, double v, double* error) const {
    // Split where tu + (1-t)v crosses an interior singular point of f.
    std::vector<double> cuts{0.0, 1.0};
    for (double tau : integrand_f_.singular_set()) {
        const double t = (tau - v) / (u - v);
        if (t > 1e-12 && t < 1.0 - 1e-12) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    double value = 0.0, err = 0.0, L1 = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double e = 0.0, l = 0.0;
        value += piece(u, v, cuts[i], cuts[i + 1], &e, &l);
        err += e;
        L1 += l;
    }
    if (!std::isfinite(value) || err > std::max(tolerance_, 1e-8 * L1))
        throw NumericalError("U-functional quadrature did not converge for f=" + integrand_f_.tag() + " at (u,v)=(" +
                                 fmt(u) + "," + fmt(v) + ")",
                             err, {value, L1});
    if (error) *error = err;
    return value;
}

double u_value(const EntropyFunction& f, double u, double v, const QuadratureSpec& quad) {
    quad.validate();
    return UFunctional(f, quad.tolerance, quad.refinement_levels)(u, v);
}

// ---------------------------------------------------------------------------

Concavity concavity_classify(double gamma, int grid_size) {
    check_gamma(gamma);
    if (grid_size < 100) throw std::invalid_argument("concavity_classify: grid_size must be at least 100");
    const double lo = 1e-6, hi = 1.0 - 1e-6;
    for (int i = 0; i < grid_size; ++i) {
        const double t = lo + (hi - lo) * i / (grid_size - 1);
        if (eta_derivative(gamma, t, 2) > 0.0) return Concavity::neither;
    }
    return Concavity::concave;
}

std::vector<double> remainder_limit_scan(double gamma, int k, const std::vector<double>& t_list) {
    if (k < 0 || k > 2) throw std::invalid_argument("remainder_limit_scan: k must be 0, 1 or 2");
    const Table1Row row = table1(gamma);
    std::vector<double> out;
    out.reserve(t_list.size());
    double prev = 1.0;
    for (double t : t_list) {
        if (!(t > 0.0 && t < 0.5)) throw std::invalid_argument("remainder_limit_scan: t must lie in (0,1/2)");
        if (t >= prev) throw std::invalid_argument("remainder_limit_scan: t_list must be decreasing");
        prev = t;
        const double diff = row.f.derivative(t, k) - row.eta_eff.derivative(t, k);
        out.push_back(std::pow(t, k - row.delta) * diff);
    }
    return out;
}

}  // namespace fent
