#include "fent/matrix_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fent/entropy.hpp"
#include "fent/quadrature.hpp"

namespace fent {

namespace {

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

nlohmann::json matrix_json(const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

void check_gamma_positive(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("γ must be positive");
}

template <class Margin>
CheckReport run_check(const std::string& name, double gamma, const RandomEnsembleSpec& spec, Margin margin) {
    spec.validate();
    std::vector<double> margins(spec.trials);
    parallel_for(static_cast<std::size_t>(spec.trials), [&](std::size_t t) {
        const Eigen::MatrixXd A = random_state(spec.n, spec.seed, t);
        const Eigen::MatrixXd P = random_projection(spec.n, spec.rank, spec.seed, t);
        margins[t] = margin(A, P);
    });
    CheckReport r;
    r.check = name;
    r.gamma = gamma;
    r.trials = spec.trials;
    r.worst_margin = std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
    for (std::size_t t = 0; t < margins.size(); ++t) {
        if (margins[t] < -1e-9) ++r.violations;
        if (margins[t] < r.worst_margin) {
            r.worst_margin = margins[t];
            worst = t;
        }
    }
    if (r.violations > 0)
        r.witness = nlohmann::json{{"trial", worst},
                                   {"A", matrix_json(random_state(spec.n, spec.seed, worst))},
                                   {"P", matrix_json(random_projection(spec.n, spec.rank, spec.seed, worst))}};
    return r;
}

}  // namespace

void RandomEnsembleSpec::validate() const {
    if (n < 1 || n > 16) throw std::invalid_argument("ensemble: n must lie in [1, 16]");
    if (trials < 1) throw std::invalid_argument("ensemble: trials must be positive");
    if (rank < 0 || rank > n) throw std::invalid_argument("ensemble: rank must lie in [0, n]");
}

nlohmann::json CheckReport::to_json() const {
    nlohmann::json j{{"check", check}, {"gamma", gamma}, {"trials", trials}, {"worst_margin", worst_margin},
                     {"violations", violations}};
    if (witness) j["witness"] = *witness;
    return j;
}

Eigen::MatrixXd matrix_eta(double gamma, const Eigen::MatrixXd& A) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd v = es.eigenvalues();
    for (int i = 0; i < v.size(); ++i) v[i] = eta(gamma, std::clamp(v[i], 0.0, 1.0));
    return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd random_orthogonal(int n, std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
    auto rng = trial_rng(seed, trial, stream);
    std::normal_distribution<double> g;
    Eigen::MatrixXd X(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = g(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    // Sign fix so that Q is Haar distributed.
    for (int j = 0; j < n; ++j)
        if (R(j, j) < 0.0) Q.col(j) *= -1.0;
    return Q;
}

Eigen::MatrixXd random_state(int n, std::uint64_t seed, std::uint64_t trial) {
    const Eigen::MatrixXd Q = random_orthogonal(n, seed, trial, 1);
    auto rng = trial_rng(seed, trial, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = u(rng);
    return Q * lam.asDiagonal() * Q.transpose();
}

Eigen::MatrixXd random_projection(int n, int rank, std::uint64_t seed, std::uint64_t trial) {
    auto rng = trial_rng(seed, trial, 3);
    const int k = rank > 0 ? rank : std::uniform_int_distribution<int>(1, n)(rng);
    const Eigen::MatrixXd Q = random_orthogonal(n, seed, trial, 4);
    const Eigen::MatrixXd V = Q.leftCols(k);
    return V * V.transpose();
}

double davis_margin(double gamma, const Eigen::MatrixXd& A, const Eigen::MatrixXd& P) {
    const Eigen::MatrixXd PAP = P * A * P;
    Eigen::MatrixXd D = P * matrix_eta(gamma, 0.5 * (PAP + PAP.transpose())) * P - P * matrix_eta(gamma, A) * P;
    D = 0.5 * (D + D.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double berezin_margin(double gamma, const Eigen::MatrixXd& A, const Eigen::MatrixXd& P) {
    const Eigen::MatrixXd PAP = P * A * P;
    return (P * matrix_eta(gamma, 0.5 * (PAP + PAP.transpose())) * P).trace() - (P * matrix_eta(gamma, A) * P).trace();
}

double midpoint_margin(double gamma, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd D = matrix_eta(gamma, 0.5 * (A + B)) - 0.5 * (matrix_eta(gamma, A) + matrix_eta(gamma, B));
    D = 0.5 * (D + D.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

CheckReport davis_check(double gamma, const RandomEnsembleSpec& spec) {
    check_gamma_positive(gamma);
    if (gamma > 1.0) throw std::invalid_argument("davis_check: operator concavity needs γ ≤ 1");
    return run_check("davis", gamma, spec,
                     [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& P) { return davis_margin(gamma, A, P); });
}

CheckReport berezin_check(double gamma, const RandomEnsembleSpec& spec) {
    check_gamma_positive(gamma);
    if (gamma > 2.0) throw std::invalid_argument("berezin_check: concavity needs γ ≤ 2");
    return run_check("berezin", gamma, spec,
                     [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& P) { return berezin_margin(gamma, A, P); });
}

nlohmann::json MidpointResult::to_json(double gamma) const {
    nlohmann::json j{{"check", "midpoint_concavity"}, {"gamma", gamma}, {"trials", trials},
                     {"result", found ? "counterexample" : "no_violation"}, {"margin", margin}};
    if (found) {
        j["A"] = matrix_json(A);
        j["B"] = matrix_json(B);
    }
    if (!note.empty()) j["note"] = note;
    return j;
}

MidpointResult midpoint_concavity_search(double gamma, int budget, std::uint64_t seed, double threshold) {
    check_gamma_positive(gamma);
    if (budget < 1) throw std::invalid_argument("midpoint_concavity_search: budget must be positive");
    MidpointResult res;
    res.margin = std::numeric_limits<double>::infinity();
    constexpr int kBatch = 1024;
    for (int start = 0; start < budget; start += kBatch) {
        const int count = std::min(kBatch, budget - start);
        std::vector<double> margins(count);
        std::vector<Eigen::MatrixXd> As(count), Bs(count);
        parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
            auto rng = trial_rng(seed, static_cast<std::uint64_t>(start) + i, 5);
            std::uniform_real_distribution<double> ev(0.01, 0.99), ang(0.0, std::numbers::pi);
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2), D = Eigen::MatrixXd::Zero(2, 2), R(2, 2);
            A(0, 0) = ev(rng);
            A(1, 1) = ev(rng);
            D(0, 0) = ev(rng);
            D(1, 1) = ev(rng);
            const double th = ang(rng);
            R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
            As[i] = A;
            Bs[i] = R * D * R.transpose();
            margins[i] = midpoint_margin(gamma, As[i], Bs[i]);
        });
        for (int i = 0; i < count; ++i) {
            ++res.trials;
            if (margins[i] < res.margin) {
                res.margin = margins[i];
                res.A = As[i];
                res.B = Bs[i];
            }
        }
        if (res.margin < -threshold) {
            res.found = true;
            return res;
        }
    }
    res.note = "budget of " + std::to_string(budget) + " trials exhausted";
    return res;
}

double branch_point_function(double gamma, double y) {
    return std::pow(2.0, 1.0 - gamma) * std::pow(1.0 + y * y, 0.5 * gamma) * std::cos(gamma * std::atan(y));
}

double branch_point_probe(double gamma, const std::vector<double>& y_grid) {
    if (!(gamma > 1.0)) throw std::invalid_argument("branch_point_probe: γ must exceed 1");
    if (y_grid.size() < 2) throw std::invalid_argument("branch_point_probe: grid needs two points");
    for (std::size_t i = 0; i + 1 < y_grid.size(); ++i) {
        double lo = y_grid[i], hi = y_grid[i + 1];
        if (!(hi > lo)) throw std::invalid_argument("branch_point_probe: grid must increase");
        double flo = branch_point_function(gamma, lo);
        if (flo == 0.0) return lo;
        if (flo * branch_point_function(gamma, hi) > 0.0) continue;
        while (hi - lo > 1e-10 * std::max(1.0, std::fabs(lo))) {
            const double mid = 0.5 * (lo + hi);
            const double fm = branch_point_function(gamma, mid);
            if (fm == 0.0) return mid;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace fent
