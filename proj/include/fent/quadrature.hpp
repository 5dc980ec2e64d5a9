#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fent {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// n-point Gauss–Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

// Composite rule: `panels` equal Gauss–Legendre panels of order n on [a, b].
Rule composite_gauss_legendre(int n, int panels, double a, double b);

// Worker count used by module-level parallel loops. 1 means serial.
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n). Each index writes only its own output slot,
// so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fent

namespace fent {

// Discretization controls shared by the coefficient and density routines.
// Zero-valued radii are derived from the symbol's decay.
struct QuadratureSpec {
    double pv_cutoff = 1e-2;          // ε of the principal-value limit
    double t_max = 0.0;
    double xi_radius = 0.0;
    int nodes_perp = 40;
    int nodes_x = 64;
    int nodes_t = 40;
    double tolerance = 1e-10;
    int refinement_levels = 12;
    double support_threshold = 1e-16;

    void validate() const;
};

}  // namespace fent
