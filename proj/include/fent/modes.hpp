#pragma once

#include <vector>

#include "fent/entropy.hpp"
#include "fent/thermo.hpp"

namespace fent {

// Angular-momentum decomposition of W_α(a, Λ) for a radial symbol on a ball
// or annulus centred at the origin. Each channel ℓ is a radial integral
// operator with kernel c² ∫ A(ρ) Z_ℓ(αρr) Z_ℓ(αρr') ρ^{d-1} dρ (Z = J_ℓ in
// d = 2, j_ℓ in d = 3), discretized by Gauss–Legendre in r and ρ.
struct PolarOptions {
    double safety = 1.0;           // scales the node counts
    double rho_threshold = 1e-16;  // ρ-support cut, relative to max |A|
};

struct PolarTraces {
    std::vector<double> trace;   // tr f(W) per requested f
    std::vector<double> volume;  // discrete tr W(f∘a) on the same nodes
    int channels = 0;
    int nodes_r = 0;
    int nodes_rho = 0;
};

PolarTraces polar_traces(const Symbol& a, double r_in, double r_out, double alpha,
                         const std::vector<EntropyFunction>& fs, const PolarOptions& opts = {});

// J_ℓ(x) (d = 2) or j_ℓ(x) (d = 3) for ℓ in [l0, l1), by Miller's downward
// recurrence normalized at low order.
void bessel_block(int d, double x, int l0, int l1, double* out);

}  // namespace fent
