#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fent {

// Raised when a numerical procedure cannot meet its contract. The residual
// and the history (partial sums, refinement values, ...) travel with it.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual = 0.0,
                   std::vector<double> history = {})
        : std::runtime_error(what), residual_(residual), history_(std::move(history)) {}

    double residual() const noexcept { return residual_; }
    const std::vector<double>& history() const noexcept { return history_; }

private:
    double residual_;
    std::vector<double> history_;
};

}  // namespace fent
