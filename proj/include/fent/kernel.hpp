#pragma once

#include <vector>

#include "fent/quadrature.hpp"
#include "fent/thermo.hpp"

namespace fent {

// ǎ(z) = (2π)^{-d} ∫ e^{iz·ξ} a(ξ) dξ for an even symbol, valid for |z| ≤ z_max.
// Radial symbols reduce to a Hankel-type integral on [0, R_ξ]; the rule is
// built once and refined until two panel counts agree. Immutable afterwards.
class KernelTransform {
public:
    KernelTransform(const Symbol& a, double z_max, const QuadratureSpec& quad = {});

    double operator()(double r) const;  // radial symbols only
    double operator()(Point z) const;

    double z_max() const { return z_max_; }
    double xi_radius() const { return R_; }
    int dimension() const { return d_; }
    std::size_t nodes() const { return rule_.size(); }

private:
    double radial_sum(double r) const;

    Symbol a_;
    int d_;
    double z_max_, R_;
    Rule rule_;                   // radial rule on [0, R] or per-axis rule on [-R, R]
    std::vector<double> weight_;  // rule weight times a and the Jacobian
};

double kernel_transform(const Symbol& a, Point z, const QuadratureSpec& quad = {});

}  // namespace fent
