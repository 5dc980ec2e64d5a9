#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fent/quadrature.hpp"

namespace fent {

enum class EntropyKind {
    renyi,           // η_γ
    von_neumann,     // η_1
    eta_log,         // -t ln|t|
    power,           // M |t|^δ
    effective,       // small-t model η_γ^eff
    linear_shifted,  // f_γ = η_γ - c_γ t
    eta_infinity,    // min{-ln(1-t), -ln t} on [0,1]
    affine,          // slope·t + intercept
    log,             // ln t
    neg_log1m,       // -ln(1-t)
    custom
};

class EntropyFunction {
public:
    static EntropyFunction renyi(double gamma);
    static EntropyFunction von_neumann();
    static EntropyFunction eta_log();
    static EntropyFunction power(double M, double delta);
    static EntropyFunction quadratic(double c = 1.0) { return power(c, 2.0); }
    static EntropyFunction effective(double gamma);
    static EntropyFunction linear_shifted(double gamma);
    static EntropyFunction eta_infinity();
    static EntropyFunction affine(double slope, double intercept = 0.0);
    static EntropyFunction log();
    static EntropyFunction neg_log1m();
    static EntropyFunction custom(std::function<double(double)> f, std::vector<double> singular_set,
                                  double hoelder_exponent, std::string tag);

    double operator()(double t) const;
    // Same value with 1-t supplied separately, for precision near t = 1.
    double value(double t, double complement) const;
    // k-th derivative, k ∈ {0,1,2}; analytic for catalog kinds.
    double derivative(double t, int k) const;

    EntropyKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    const std::vector<double>& singular_set() const { return singular_; }
    double hoelder_exponent() const { return hoelder_; }
    const std::string& tag() const { return tag_; }

    // c when f(t) = c t² on the relevant range.
    std::optional<double> quadratic_coefficient() const;
    bool is_affine() const { return kind_ == EntropyKind::affine; }
    // Polynomial kinds are applied to raw eigenvalues; the rest to values clamped into [0,1].
    bool is_polynomial() const;

private:
    EntropyFunction() = default;

    EntropyKind kind_ = EntropyKind::custom;
    double gamma_ = 0.0;
    double M_ = 0.0;       // power / effective coefficient, affine slope
    double delta_ = 0.0;   // power exponent, affine intercept
    double shift_ = 0.0;   // linear_shifted c_γ
    bool eff_log_ = false; // effective(1) is -t ln t
    std::vector<double> singular_;
    double hoelder_ = 1.0;
    std::string tag_;
    std::shared_ptr<const std::function<double(double)>> fn_;
};

// Parses CLI tags: quadratic, linear, renyi:γ, von_neumann, eta_log, power:M:δ,
// effective:γ, shifted:γ, eta_infinity, affine:a:b, log, neg_log1m.
EntropyFunction parse_entropy_function(const std::string& tag);

// Rényi entropy η_γ(t); γ = 1 gives the von Neumann function.
double eta(double gamma, double t);
double eta_derivative(double gamma, double t, int k);

double second_derivative_eta(double gamma, double t);

// Regime boundaries (γ = 1, 2) snap within this distance.
constexpr double kRegimeSnap = 1e-12;
double snap_gamma(double gamma);

struct Table1Row {
    double delta;
    EntropyFunction f;        // f_γ, linear_shifted kind
    EntropyFunction eta_eff;  // effective kind
};
Table1Row table1(double gamma);
// c_γ with f_γ(t) = η_γ(t) - c_γ t.
double linear_shift(double gamma);

// U(u,v;f) of the concavity-defect integral. Closed forms for affine,
// quadratic, ln and -ln(1-·); tanh-sinh quadrature otherwise.
class UFunctional {
public:
    explicit UFunctional(EntropyFunction f, double tolerance = 1e-10, int max_levels = 12);
    double operator()(double u, double v) const;
    // Same value; error receives the quadrature error estimate (0 for closed forms).
    double evaluate(double u, double v, double* error) const;
    const EntropyFunction& function() const { return f_; }
    bool has_closed_form(double u, double v) const;

private:
    double quadrature(double u, double v, double* error) const;
    double gauss(double u, double v) const;
    double piece(double u, double v, double a, double b, double* error, double* L1) const;

    EntropyFunction f_;
    EntropyFunction integrand_f_;
    double tolerance_;
    int max_levels_;
};

double u_value(const EntropyFunction& f, double u, double v, const QuadratureSpec& quad);

enum class Concavity { concave, neither };
Concavity concavity_classify(double gamma, int grid_size);

// t^{k-δ_γ} (d/dt)^k (f_γ - η_γ^eff)(t) for each t.
std::vector<double> remainder_limit_scan(double gamma, int k, const std::vector<double>& t_list);

}  // namespace fent
