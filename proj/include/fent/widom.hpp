#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fent/entropy.hpp"
#include "fent/quadrature.hpp"
#include "fent/region.hpp"
#include "fent/thermo.hpp"

namespace fent {

enum class Method { pv_quadrature, parseval, closed_form, series, hs_oracle };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct CoefficientResult {
    double value = 0.0;
    double error_estimate = 0.0;
    Method method = Method::pv_quadrature;
    std::string symbol_tag, region_tag, f_tag;
    std::string note;

    nlohmann::json to_json() const;
    static CoefficientResult from_json(const nlohmann::json& j);
    bool operator==(const CoefficientResult&) const = default;
};

// 𝓐(a, e; f) = (8π²)^{-1} lim_{ε↓0} ∫∫_{|t|>ε} U(a(ξ), a(ξ+te); f)/t² dt dξ.
CoefficientResult a_functional(const Symbol& a, const std::vector<double>& e, const EntropyFunction& f,
                               const QuadratureSpec& quad = {});

// 𝓑(a, ∂Λ; f) = (2π)^{1-d} ∫_{∂Λ} 𝓐(a, n_x; f) dσ(x). Half-spaces give the
// value per unit boundary measure.
CoefficientResult b_coefficient(const Symbol& a, const Region& region, const EntropyFunction& f,
                                const QuadratureSpec& quad = {});

// 𝓑 for f(t) = c t² through Plancherel:
//   𝓐 = -c (8π²)^{-1} (2π)^{1-d} ∫ |â(z)|² |z·e| dz.
CoefficientResult b_parseval_quadratic(const Symbol& a, const Region& region, double c,
                                       const QuadratureSpec& quad = {});

// Σ(d) = Σ_{n,m≥1} (-1)^{n+m} (nm)^{-1/2} (n+m)^{-(d+1)/2}.
CoefficientResult sigma_series(int d, double tol);

// Closed form -γ/(γ-1) 2^{-d-3} π^{-(d+1)/2} |∂Λ|; compared, not trusted.
CoefficientResult b_closed_form_gaussian(double gamma, int d, double boundary_area);
// -(1/2)(2π)^{-(d+1)/2} Σ(d) |∂Λ|.
CoefficientResult b_eta_infinity_gaussian(int d, double boundary_area, double tol = 1e-10);

struct ContinuityRow {
    double lambda;
    CoefficientResult result;
    double deviation;  // |𝓑(a_λ) - 𝓑(a_0)|
};
// Evaluates 𝓑(a_λ) for each λ against the reference 𝓑(family(0)).
std::vector<ContinuityRow> continuity_scan(const std::function<Symbol(double)>& family, const Region& region,
                                           const EntropyFunction& f, const std::vector<double>& lambdas,
                                           const QuadratureSpec& quad = {});

}  // namespace fent
