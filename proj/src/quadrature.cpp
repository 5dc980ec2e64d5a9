#include "fent/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fent {

namespace {

struct Reference {
    std::vector<double> x, w;  // on [-1, 1]
};

const Reference& reference_rule(int n) {
    static std::mutex mutex;
    static std::map<int, Reference> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
    if (!table) throw std::runtime_error("gauss_legendre: table allocation failed");
    Reference r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i)
        gsl_integration_glfixed_point(-1.0, 1.0, i, &r.x[i], &r.w[i], table);
    gsl_integration_glfixed_table_free(table);
    return cache.emplace(n, std::move(r)).first->second;
}

std::atomic<int> g_threads{1};

}  // namespace

Rule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    const Reference& ref = reference_rule(n);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.x[i] = mid + half * ref.x[i];
        r.w[i] = half * ref.w[i];
    }
    return r;
}

Rule composite_gauss_legendre(int n, int panels, double a, double b) {
    Rule r;
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        Rule part = gauss_legendre(n, a + p * step, a + (p + 1) * step);
        r.x.insert(r.x.end(), part.x.begin(), part.x.end());
        r.w.insert(r.w.end(), part.w.begin(), part.w.end());
    }
    return r;
}

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace fent

namespace fent {

void QuadratureSpec::validate() const {
    if (!(pv_cutoff > 0.0)) throw std::invalid_argument("QuadratureSpec: pv_cutoff must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("QuadratureSpec: tolerance must be positive");
    if (t_max < 0.0 || xi_radius < 0.0) throw std::invalid_argument("QuadratureSpec: radii must be nonnegative");
    if (nodes_perp < 2 || nodes_x < 2 || nodes_t < 2)
        throw std::invalid_argument("QuadratureSpec: node counts must be at least 2");
    if (refinement_levels < 1) throw std::invalid_argument("QuadratureSpec: refinement_levels must be positive");
    if (!(support_threshold > 0.0 && support_threshold < 1.0))
        throw std::invalid_argument("QuadratureSpec: support_threshold must lie in (0,1)");
}

}  // namespace fent
