#include "fent/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <cblas.h>
#include <lapacke.h>

#include "fent/errors.hpp"
#include "fent/quadrature.hpp"

namespace fent {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBlock = 32;  // channels per Bessel pass

double clamp_unit(double lambda) {
    if (lambda < -1e-3 || lambda > 1.0 + 1e-3)
        throw NumericalError("polar route: eigenvalue outside [0,1]; refine the discretization", lambda);
    return std::clamp(lambda, 0.0, 1.0);
}

double apply(const EntropyFunction& f, double lambda) {
    return f.is_polynomial() ? f(lambda) : f(clamp_unit(lambda));
}

}  // namespace

void bessel_block(int d, double x, int l0, int l1, double* out) {
    if (d != 2 && d != 3) throw std::invalid_argument("bessel_block: dimension must be 2 or 3");
    if (l0 < 0 || l1 < l0) throw std::invalid_argument("bessel_block: bad order range");
    const int n = l1 - l0;
    if (n == 0) return;
    if (x < 1e-6) {
        // Leading series term; the first correction is O(x²) relative.
        double term = 1.0;  // (x/2)^ℓ/ℓ! or x^ℓ/(2ℓ+1)!!
        for (int l = 0; l < l1; ++l) {
            if (l >= l0) out[l - l0] = l == 0 ? 1.0 - x * x / (d == 2 ? 4.0 : 6.0) : term;
            term *= d == 2 ? 0.5 * x / (l + 1) : x / (2 * l + 3);
            if (term < 1e-300) term = 0.0;
        }
        return;
    }
    int N = static_cast<int>(std::max<double>(l1, x) + 20.0 + 10.0 * std::cbrt(x));
    if (N % 2) ++N;
    std::fill(out, out + n, 0.0);
    double up = 0.0, cur = 1e-30, sum = 0.0, first = 0.0;  // first: Z_1 for the d = 3 fit
    // Downward recurrence; cur holds Z_{k} after each step.
    for (int k = N; k >= 1; --k) {
        const double lower = (d == 2 ? 2.0 * k : 2.0 * k + 1.0) / x * cur - up;
        up = cur;
        cur = lower;  // Z_{k-1}
        const int l = k - 1;
        if (l >= l0 && l < l1) out[l - l0] = cur;
        if (l == 1) first = cur;
        if (d == 2 && l > 0 && l % 2 == 0) sum += 2.0 * cur;
        if (std::fabs(cur) > 1e250) {
            cur *= 1e-250;
            up *= 1e-250;
            sum *= 1e-250;
            first *= 1e-250;
            for (int i = 0; i < n; ++i) out[i] *= 1e-250;
        }
    }
    double scale;
    if (d == 2) {
        scale = 1.0 / (sum + cur);  // J_0 + 2 Σ J_{2k} = 1
    } else {
        const double j0 = std::sin(x) / x, j1 = std::sin(x) / (x * x) - std::cos(x) / x;
        // Ratios first: cur can sit near 1e250, so squaring it overflows.
        const double m = std::max(std::fabs(cur), std::fabs(first));
        const double a = cur / m, b = first / m;
        scale = (j0 * a + j1 * b) / ((a * a + b * b) * m);
    }
    for (int i = 0; i < n; ++i) out[i] *= scale;
}

PolarTraces polar_traces(const Symbol& a, double r_in, double r_out, double alpha,
                         const std::vector<EntropyFunction>& fs, const PolarOptions& opts) {
    const int d = a.dimension();
    if (!a.radial()) throw std::invalid_argument("polar route: symbol must be radial");
    if (d != 2 && d != 3) throw std::invalid_argument("polar route: dimension must be 2 or 3");
    if (!(r_in >= 0.0 && r_out > r_in)) throw std::invalid_argument("polar route: need 0 <= r_in < r_out");
    if (!(alpha > 0.0)) throw std::invalid_argument("polar route: alpha must be positive");
    if (!(opts.safety > 0.0 && opts.rho_threshold > 0.0)) throw std::invalid_argument("polar route: bad options");

    const double rho_max = std::max(a.decay_radius(opts.rho_threshold), 1e-12);
    const double x_max = alpha * rho_max * r_out;
    const int n_rho = static_cast<int>(std::ceil(opts.safety * (0.5 * x_max + 20.0)));
    const int n_r = static_cast<int>(std::ceil(opts.safety * (0.5 * alpha * rho_max * (r_out - r_in) + 20.0)));
    const int l_cap = static_cast<int>(std::ceil(x_max + 10.0 * std::cbrt(x_max) + 40.0));

    const Rule rr = gauss_legendre(n_r, r_in, r_out);
    const Rule rk = gauss_legendre(n_rho, 0.0, rho_max);
    std::vector<double> A(n_rho), sr(n_r), sk(n_rho);
    double amax = 0.0;
    for (int k = 0; k < n_rho; ++k) {
        A[k] = a.radial_value(rk.x[k]);
        amax = std::max(amax, std::fabs(A[k]));
        sk[k] = std::sqrt(rk.w[k] * std::pow(rk.x[k], d - 1));
    }
    for (int i = 0; i < n_r; ++i) sr[i] = std::sqrt(rr.w[i] * std::pow(rr.x[i], d - 1));
    const double c = d == 2 ? alpha : std::sqrt(2.0 * alpha * alpha * alpha / kPi);
    bool nonneg = true;
    std::vector<int> keep;  // ρ nodes inside the support
    for (int k = 0; k < n_rho; ++k) {
        if (std::fabs(A[k]) > opts.rho_threshold * amax) keep.push_back(k);
        if (A[k] < 0.0) nonneg = false;
    }
    const int nk = static_cast<int>(keep.size());

    PolarTraces out;
    out.trace.assign(fs.size(), 0.0);
    out.volume.assign(fs.size(), 0.0);
    out.nodes_r = n_r;
    out.nodes_rho = nk;
    if (nk == 0) return out;

    std::vector<double> fA(fs.size() * nk);
    for (std::size_t q = 0; q < fs.size(); ++q)
        for (int k = 0; k < nk; ++k) fA[q * nk + k] = apply(fs[q], A[keep[k]]);

    double trace0 = -1.0;
    int quiet = 0;
    std::vector<double> block(static_cast<std::size_t>(kBlock) * n_r * nk);
    for (int l0 = 0; l0 <= l_cap && quiet < 4; l0 += kBlock) {
        const int l1 = std::min(l0 + kBlock, l_cap + 1);
        const int nl = l1 - l0;
        // block[(ℓ - l0)][i][k] = Z_ℓ(α ρ_k r_i)
        parallel_for(static_cast<std::size_t>(n_r), [&](std::size_t i) {
            std::vector<double> z(nl);
            for (int k = 0; k < nk; ++k) {
                const double x = alpha * rk.x[keep[k]] * rr.x[i];
                if (l0 > x + 20.0 + 10.0 * std::cbrt(x) + 40.0) {
                    std::fill(z.begin(), z.end(), 0.0);
                } else {
                    bessel_block(d, x, l0, l1, z.data());
                }
                for (int l = 0; l < nl; ++l) block[(static_cast<std::size_t>(l) * n_r + i) * nk + k] = z[l];
            }
        });

        std::vector<std::vector<double>> ch_trace(nl, std::vector<double>(fs.size())),
            ch_volume(nl, std::vector<double>(fs.size()));
        std::vector<double> ch_w(nl, 0.0);
        parallel_for(static_cast<std::size_t>(nl), [&](std::size_t li) {
            const double* Z = &block[li * n_r * nk];
            // Rows whose Bessel values vanish carry no spectrum.
            std::vector<double> B;
            std::vector<double> col(nk, 0.0);  // Σ_i B_ik²
            int rows = 0;
            double wtr = 0.0;
            for (int i = 0; i < n_r; ++i) {
                double s2 = 0.0;
                for (int k = 0; k < nk; ++k) {
                    const double b = c * sr[i] * sk[keep[k]] * Z[i * nk + k];
                    s2 += b * b * std::fabs(A[keep[k]]);
                }
                if (s2 == 0.0) continue;
                for (int k = 0; k < nk; ++k) {
                    const double b = c * sr[i] * sk[keep[k]] * Z[i * nk + k];
                    col[k] += b * b;
                    B.push_back(b);
                }
                wtr += s2;
                ++rows;
            }
            ch_w[li] = wtr;
            if (rows == 0) return;
            for (std::size_t q = 0; q < fs.size(); ++q) {
                double v = 0.0;
                for (int k = 0; k < nk; ++k) v += fA[q * nk + k] * col[k];
                ch_volume[li][q] = v;
            }
            // W_ℓ = B diag(A) Bᵀ; for A ≥ 0 use the smaller Gram matrix.
            std::vector<double> G;
            int n;
            if (nonneg) {
                std::vector<double> Bs(B);
                for (int i = 0; i < rows; ++i)
                    for (int k = 0; k < nk; ++k) Bs[static_cast<std::size_t>(i) * nk + k] *= std::sqrt(A[keep[k]]);
                if (rows <= nk) {
                    n = rows;
                    G.assign(static_cast<std::size_t>(n) * n, 0.0);
                    cblas_dsyrk(CblasRowMajor, CblasUpper, CblasNoTrans, n, nk, 1.0, Bs.data(), nk, 0.0, G.data(), n);
                } else {
                    n = nk;
                    G.assign(static_cast<std::size_t>(n) * n, 0.0);
                    cblas_dsyrk(CblasRowMajor, CblasUpper, CblasTrans, n, rows, 1.0, Bs.data(), nk, 0.0, G.data(), n);
                }
            } else {
                n = rows;
                std::vector<double> BA(B);
                for (int i = 0; i < rows; ++i)
                    for (int k = 0; k < nk; ++k) BA[static_cast<std::size_t>(i) * nk + k] *= A[keep[k]];
                G.assign(static_cast<std::size_t>(n) * n, 0.0);
                cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, n, n, nk, 1.0, BA.data(), nk, B.data(), nk, 0.0,
                            G.data(), n);
            }
            std::vector<double> ev(n);
            if (LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', n, G.data(), n, ev.data()) != 0)
                throw NumericalError("polar route: eigensolver failed");
            for (std::size_t q = 0; q < fs.size(); ++q) {
                double s = 0.0;
                for (double lam : ev) s += apply(fs[q], lam);
                ch_trace[li][q] = s;
            }
        });

        for (int li = 0; li < nl; ++li) {
            const int l = l0 + li;
            const double mult = d == 2 ? (l == 0 ? 1.0 : 2.0) : 2.0 * l + 1.0;
            for (std::size_t q = 0; q < fs.size(); ++q) {
                out.trace[q] += mult * ch_trace[li][q];
                out.volume[q] += mult * ch_volume[li][q];
            }
            if (trace0 < 0.0) trace0 = ch_w[li];
            out.channels = l + 1;
            // Channels beyond the Bessel turning point are super-exponentially small.
            if (ch_w[li] <= 1e-24 * trace0) ++quiet;
            else quiet = 0;
        }
    }
    return out;
}

}  // namespace fent
