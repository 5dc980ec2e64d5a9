#include "fent/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fent/errors.hpp"

namespace fent {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelOrder = 32;

double bessel_factor(int d, double x) {
    if (d == 2) return std::cyl_bessel_j(0.0, x);
    return x < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

}  // namespace

KernelTransform::KernelTransform(const Symbol& a, double z_max, const QuadratureSpec& quad)
    : a_(a), d_(a.dimension()), z_max_(z_max) {
    if (!a.even()) throw std::invalid_argument("kernel_transform: symbol must be even for a real kernel");
    if (!(z_max >= 0.0)) throw std::invalid_argument("kernel_transform: z_max must be nonnegative");
    quad.validate();
    R_ = quad.xi_radius > 0.0 ? quad.xi_radius : a.decay_radius(1e-2 * quad.support_threshold);
    if (R_ == 0.0) R_ = 1.0;

    // GL needs roughly 2 z R / π nodes beyond the smooth-part count.
    const int base = static_cast<int>(std::ceil((2.0 * z_max * R_ / kPi + 64.0) / kPanelOrder));
    if (a.radial()) {
        const double pref = d_ == 2 ? 1.0 / (2 * kPi) : 1.0 / (2 * kPi * kPi);
        auto build = [&](int panels) {
            rule_ = composite_gauss_legendre(kPanelOrder, panels, 0.0, R_);
            weight_.resize(rule_.size());
            for (std::size_t i = 0; i < rule_.size(); ++i)
                weight_[i] = pref * rule_.w[i] * a.radial_value(rule_.x[i]) * std::pow(rule_.x[i], d_ - 1);
        };
        // Refine until two panel counts agree at a few probe radii.
        const std::vector<double> probes{0.0, 0.37 * z_max, 0.71 * z_max, z_max};
        int panels = base;
        build(panels);
        std::vector<double> prev;
        for (double z : probes) prev.push_back(radial_sum(z));
        for (int it = 0;; ++it) {
            build(2 * panels);
            double diff = 0.0;
            for (std::size_t k = 0; k < probes.size(); ++k) diff = std::max(diff, std::fabs(radial_sum(probes[k]) - prev[k]));
            const double scale = std::fabs(radial_sum(0.0));
            if (diff <= 1e-12 * std::max(scale, 1e-300) + 1e-15) return;
            if (it == 6) throw NumericalError("kernel_transform: radial rule did not converge for " + a.tag(), diff);
            panels *= 2;
            prev.clear();
            for (double z : probes) prev.push_back(radial_sum(z));
        }
    }
    rule_ = composite_gauss_legendre(kPanelOrder, 2 * base, -R_, R_);
}

double KernelTransform::radial_sum(double r) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rule_.size(); ++i) s += weight_[i] * bessel_factor(d_, r * rule_.x[i]);
    return s;
}

double KernelTransform::operator()(double r) const {
    if (!a_.radial()) throw std::logic_error("KernelTransform: radial evaluation of a non-radial symbol");
    return radial_sum(std::fabs(r));
}

double KernelTransform::operator()(Point z) const {
    if (static_cast<int>(z.size()) != d_) throw std::invalid_argument("kernel_transform: dimension mismatch");
    if (a_.radial()) return radial_sum(norm(z));
    const std::size_t n = rule_.size();
    const double pref = std::pow(2 * kPi, -d_);
    double s = 0.0;
    std::vector<double> xi(d_);
    if (d_ == 2) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                xi[0] = rule_.x[i];
                xi[1] = rule_.x[j];
                s += rule_.w[i] * rule_.w[j] * a_(xi) * std::cos(z[0] * xi[0] + z[1] * xi[1]);
            }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    xi[0] = rule_.x[i];
                    xi[1] = rule_.x[j];
                    xi[2] = rule_.x[k];
                    s += rule_.w[i] * rule_.w[j] * rule_.w[k] * a_(xi) *
                         std::cos(z[0] * xi[0] + z[1] * xi[1] + z[2] * xi[2]);
                }
    }
    return pref * s;
}

double kernel_transform(const Symbol& a, Point z, const QuadratureSpec& quad) {
    return KernelTransform(a, norm(z), quad)(z);
}

}  // namespace fent
