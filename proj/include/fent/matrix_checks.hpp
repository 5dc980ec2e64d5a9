#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace fent {

struct RandomEnsembleSpec {
    int n = 8;               // matrix dimension, at most 16
    int trials = 1000;
    std::uint64_t seed = 20240607;
    // Projection rank: 0 draws it uniformly from [1, n] per trial.
    int rank = 0;

    void validate() const;
};

struct CheckReport {
    std::string check;
    double gamma = 0.0;
    int trials = 0;
    double worst_margin = 0.0;
    int violations = 0;
    std::optional<nlohmann::json> witness;  // (A, P) of the worst violating trial

    bool passed(double tol = 1e-9) const { return worst_margin >= -tol; }
    nlohmann::json to_json() const;
};

// η_γ applied through the spectral decomposition.
Eigen::MatrixXd matrix_eta(double gamma, const Eigen::MatrixXd& A);

// Trial-local draws; identical for a given (seed, trial) whatever the thread count.
Eigen::MatrixXd random_orthogonal(int n, std::uint64_t seed, std::uint64_t trial, std::uint64_t stream);
Eigen::MatrixXd random_state(int n, std::uint64_t seed, std::uint64_t trial);       // spectrum in [0,1]
Eigen::MatrixXd random_projection(int n, int rank, std::uint64_t seed, std::uint64_t trial);

// Smallest eigenvalue of P η(PAP) P - P η(A) P.
double davis_margin(double gamma, const Eigen::MatrixXd& A, const Eigen::MatrixXd& P);
// tr P η(PAP) P - tr P η(A) P.
double berezin_margin(double gamma, const Eigen::MatrixXd& A, const Eigen::MatrixXd& P);
// Smallest eigenvalue of η((A+B)/2) - (η(A) + η(B))/2.
double midpoint_margin(double gamma, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

CheckReport davis_check(double gamma, const RandomEnsembleSpec& spec);
CheckReport berezin_check(double gamma, const RandomEnsembleSpec& spec);

struct MidpointResult {
    bool found = false;
    double margin = 0.0;  // most negative margin seen
    int trials = 0;
    Eigen::MatrixXd A, B;
    std::string note;
    nlohmann::json to_json(double gamma) const;
};
// 2×2 pairs A = diag(a), B = R diag(b) Rᵀ with eigenvalues in [0.01, 0.99].
// A margin below -threshold counts as a counterexample.
MidpointResult midpoint_concavity_search(double gamma, int budget = 100000, std::uint64_t seed = 20240607,
                                         double threshold = 1e-10);

// Root y₀ of 2^{1-γ}(1+y²)^{γ/2} cos(γ arctan y) located on y_grid and
// bisected to 1e-10; +∞ when the grid shows no sign change.
double branch_point_function(double gamma, double y);
double branch_point_probe(double gamma, const std::vector<double>& y_grid);

}  // namespace fent
