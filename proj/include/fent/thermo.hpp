#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fent/entropy.hpp"
#include "fent/quadrature.hpp"

namespace fent {

using Point = std::span<const double>;

double norm(Point x);
// Surface area of the unit sphere in ℝ^d.
double sphere_area(int d);
// Volume of the unit ball in ℝ^d.
double ball_volume(int d);

class Hamiltonian {
public:
    // |ξ|²/2: m = 1, ν = 1/4.
    static Hamiltonian quadratic(int d);
    // c|ξ|²: m = 1, ν = c/2.
    static Hamiltonian scaled_quadratic(int d, double c);
    // |ξ|⁴: m = 2, ν = 1/2.
    static Hamiltonian quartic(int d);
    // |ξ|²/2 + (1+|ξ|²)^{-1}; limit part |ξ|²/2.
    static Hamiltonian perturbed_quadratic(int d);
    static Hamiltonian radial(int d, int m, double nu, std::function<double(double)> profile,
                              std::function<double(double)> limit_profile, std::string tag);
    static Hamiltonian custom(int d, int m, double nu, std::function<double(Point)> h,
                              std::function<double(Point)> limit, std::string tag);

    double operator()(Point xi) const;
    double limit(Point xi) const;
    double radial_value(double r) const;
    double radial_limit(double r) const;

    // h_∞ as a Hamiltonian of its own.
    Hamiltonian limit_hamiltonian() const;

    int dimension() const { return d_; }
    int degree_half() const { return m_; }
    double nondegeneracy() const { return nu_; }
    bool radial() const { return radial_; }
    const std::string& tag() const { return tag_; }

private:
    int d_ = 2;
    int m_ = 1;
    double nu_ = 0.25;
    bool radial_ = true;
    std::string tag_;
    std::shared_ptr<const std::function<double(double)>> profile_, limit_profile_;
    std::shared_ptr<const std::function<double(Point)>> h_, limit_;
};

enum class SymbolKind { fermi, model, limit_fermi, boltzmann, gaussian, custom };

class Symbol {
public:
    static Symbol fermi(const Hamiltonian& h, double T, double mu);
    // p_T = 1/(φ + ω e^{h/T}).
    static Symbol model(const Hamiltonian& h, double phi, double omega, double T);
    static Symbol limit_fermi(const Hamiltonian& h);
    static Symbol boltzmann(const Hamiltonian& h);
    // e^{-|ξ|²/(2 scale²)}
    static Symbol gaussian(int d, double scale = 1.0);
    static Symbol custom(int d, std::function<double(Point)> a, bool even, std::string tag);
    static Symbol custom_radial(int d, std::function<double(double)> profile, std::string tag);

    // ξ ↦ a(cξ)
    Symbol dilated(double c) const;
    // ξ ↦ λ a(ξ)
    Symbol scaled(double lambda) const;

    double operator()(Point xi) const;
    double radial_value(double r) const;

    int dimension() const { return d_; }
    bool radial() const { return radial_; }
    bool even() const { return even_; }
    SymbolKind kind() const { return kind_; }
    const std::string& tag() const { return tag_; }
    // "super-exponential" for h-driven symbols; user-declared otherwise.
    const std::string& decay() const { return decay_; }

    // Largest sampled |a|.
    double max_abs() const;
    // Radius beyond which |a| ≤ threshold·max|a| (sampled along rays).
    double decay_radius(double threshold) const;

private:
    SymbolKind kind_ = SymbolKind::custom;
    int d_ = 2;
    bool radial_ = false;
    bool even_ = true;
    std::string tag_;
    std::string decay_ = "super-exponential";
    std::shared_ptr<const std::function<double(double)>> profile_;
    std::shared_ptr<const std::function<double(Point)>> eval_;
};

// (2π)^{-d} ∫ g(a(ξ)) dξ, relative accuracy quad.tolerance.
double symbol_integral(const Symbol& a, const std::function<double(double)>& g, const QuadratureSpec& quad);

double particle_density(const Hamiltonian& h, double T, double mu, const QuadratureSpec& quad = {});
double entropy_density(const Hamiltonian& h, double T, double mu, double gamma, const QuadratureSpec& quad = {});
double integrated_dos(const Hamiltonian& h, double T_level);
double kappa(const Hamiltonian& h_inf, const QuadratureSpec& quad = {});
double lambda_T(double rho, double T, const Hamiltonian& h_inf, const QuadratureSpec& quad = {});

struct MuSolution {
    double mu;
    double density;
    double residual;    // |ϱ(μ) - ρ|
    double lambda;      // λ_T
    double diagnostic;  // e^{-μ/T} λ_T, tends to 1 as T grows
};
MuSolution solve_mu(const Hamiltonian& h, double T, double rho, double tol, const QuadratureSpec& quad = {});

// Parses CLI tags: quadratic, quartic, perturbed, scaled:c.
Hamiltonian parse_hamiltonian(const std::string& tag, int d);

}  // namespace fent
