#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fent/entropy.hpp"
#include "fent/modes.hpp"
#include "fent/quadrature.hpp"
#include "fent/region.hpp"
#include "fent/thermo.hpp"

namespace fent {

constexpr std::size_t kDefaultNodeCap = 6000;

// W_α(a, Λ) by midpoint collocation: entries α^d ǎ(α(x_i - x_j)) h^d on the
// lattice points strictly inside Λ. Row-major dense storage.
struct DiscretizedOperator {
    int dimension = 2;
    double alpha = 1.0;
    double spacing = 1.0;
    std::vector<double> nodes;   // size()·dimension coordinates
    std::vector<double> matrix;  // size()×size()
    std::string symbol_tag, region_tag;

    std::size_t size() const { return nodes.size() / static_cast<std::size_t>(dimension); }
    double operator()(std::size_t i, std::size_t j) const { return matrix[i * size() + j]; }
    // N h^d, the discrete counterpart of |Λ|.
    double measure() const;
};

// min(1/(4α), feature_size/8).
double spacing_rule(double alpha, const Region& region);

DiscretizedOperator build_w(const Symbol& a, const Region& region, double alpha, double spacing,
                            std::size_t node_cap = kDefaultNodeCap);

// Ascending eigenvalues of the symmetric matrix.
std::vector<double> eigenvalues(const DiscretizedOperator& W);
std::vector<double> symmetric_eigenvalues(std::vector<double> matrix, std::size_t n);

// Σ f(λ_i): raw λ for polynomial kinds, λ clamped into [0,1] otherwise.
// Eigenvalues more than 1e-3 outside [0,1] mean an under-resolved grid.
double trace_of_spectrum(const std::vector<double>& ev, const EntropyFunction& f);
double trace_f_of_w(const DiscretizedOperator& W, const EntropyFunction& f);

enum class Route { automatic, cartesian, polar };

struct TraceOptions {
    Route route = Route::automatic;
    double spacing = 0.0;  // 0: spacing_rule
    std::size_t node_cap = kDefaultNodeCap;
    PolarOptions polar;
    QuadratureSpec quad;
};

struct TraceD {
    double value = 0.0;        // tr D_α
    double trace_term = 0.0;   // tr f(W)
    double volume_term = 0.0;  // discrete tr W(f∘a)
    std::size_t nodes = 0;
    std::string route;
};

// tr D_α(a, Λ; f) = tr f(W) - (α/2π)^d |Λ| ∫ f(a) dξ on the Cartesian grid;
// |Λ| is taken as the grid measure N h^d so both terms see the same volume.
TraceD trace_d(const Symbol& a, const Region& region, double alpha, const EntropyFunction& f, double spacing);

// Several f on one operator. The polar route serves balls and annuli centred
// at the origin with radial symbols; everything else is Cartesian.
std::vector<TraceD> trace_d_many(const Symbol& a, const Region& region, double alpha,
                                 const std::vector<EntropyFunction>& fs, const TraceOptions& opts = {});

// -∫_Λ∫_{Λ^c} |α^d ǎ(α(x-y))|² dy dx through the covariogram; half-spaces give
// the value per unit boundary measure. Radial symbols only.
double hs_oracle_quadratic(const Symbol& a, const Region& region, double alpha, const QuadratureSpec& quad = {});

struct LocalEntropy {
    double value;         // S_γ
    double density_part;  // s_γ α^d |Λ|
    double trace_d_part;  // tr D_α(η_γ)
};
// spacing > 0 forces the Cartesian route.
LocalEntropy local_entropy(const Symbol& a, const Region& region, double alpha, double gamma, double spacing,
                           const TraceOptions& opts = {});

struct EeEstimate {
    double value;             // H_γ
    double region_part;       // tr D(Λ)
    double complement_part;   // tr D(Ω∖Λ), artificial boundary removed where possible
    double margin;
    double doubled_value;     // H_γ with twice the margin
    double stability;         // |value - doubled_value| / |value|
    std::string route;
};
// Enclosing domain Ω: a concentric disk/ball (polar route, whose outer
// boundary term is cancelled by subtracting D(Ω)) or a periodic box.
EeEstimate ee_estimate(const Symbol& a, const Region& region, double alpha, double gamma, double spacing,
                       double box_margin, const TraceOptions& opts = {});

enum class ScanMode { fixed_symbol, fixed_mu, fixed_rho };
std::string to_string(ScanMode m);
ScanMode parse_scan_mode(const std::string& s);

struct ScanSpec {
    ScanMode mode = ScanMode::fixed_symbol;
    std::optional<Symbol> symbol;        // fixed_symbol
    std::optional<EntropyFunction> f;    // fixed_symbol; defaults to η_γ
    std::optional<Hamiltonian> h;        // fixed_mu, fixed_rho
    std::vector<double> gammas{1.0};
    Region region = Region::ball(2, 1.0);
    std::vector<double> alphas;
    std::vector<double> temperatures;    // zipped with alphas, or one α for many T
    double mu = 0.0;
    double rho = 0.01;
    TraceOptions trace;
    QuadratureSpec quad;                 // for the widom targets
    bool compute_targets = true;
};

struct ScalingRow {
    double alpha = 0.0, T = 0.0, gamma = 0.0, mu = 0.0;
    double raw_trace = 0.0, normalization = 1.0, normalized = 0.0, target = 0.0, deviation = 0.0;
    double scale = 0.0;  // effective scale α T^{1/(2m)}, or α
    std::size_t nodes = 0;
};

struct ScalingReport {
    ScanMode mode = ScanMode::fixed_symbol;
    std::vector<ScalingRow> rows;

    std::string csv() const;
    nlohmann::json to_json() const;
    static ScalingReport from_json(const nlohmann::json& j);
    // Rows for one γ, in scan order.
    std::vector<ScalingRow> for_gamma(double gamma) const;
};

ScalingReport scaling_scan(const ScanSpec& spec);

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fent
