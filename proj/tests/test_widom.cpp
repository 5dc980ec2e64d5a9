#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fent/errors.hpp"
#include "fent/kernel.hpp"
#include "fent/widom.hpp"

using namespace fent;

namespace {

const double kPi = std::acos(-1.0);

// 𝓐 for a = exp(-ξᵀQξ/2), Q = diag(q1, q2), f = t², direction e. The ξ-integral
// of (a(ξ) - a(ξ+te))² is 2π/√det Q · (1 - e^{-eᵀQe t²/4}) and
// ∫(1 - e^{-c t²})/t² dt = 2√(πc).
double gaussian_a_oracle(double q1, double q2, const std::vector<double>& e) {
    const double q = q1 * e[0] * e[0] + q2 * e[1] * e[1];
    return -std::sqrt(q / (q1 * q2)) / (4 * std::sqrt(kPi));
}

// Σ(d) by repeated averaging of anti-diagonal partial sums (Cesàro-style),
// summing the double series directly.
double sigma_oracle(int d) {
    const int nmax = 4000;
    std::vector<double> partial;
    double s = 0.0;
    for (int N = 2; N <= nmax; ++N) {
        for (int n = 1; n < N; ++n)
            s += ((N % 2) ? -1.0 : 1.0) / std::sqrt(double(n) * (N - n)) * std::pow(N, -0.5 * (d + 1));
        if (N > nmax - 40) partial.push_back(s);
    }
    while (partial.size() > 1) {
        std::vector<double> next;
        for (std::size_t i = 0; i + 1 < partial.size(); ++i) next.push_back(0.5 * (partial[i] + partial[i + 1]));
        partial.swap(next);
    }
    return partial[0];
}

Symbol anisotropic_gaussian(double q1, double q2) {
    return Symbol::custom(
        2, [=](Point x) { return std::exp(-0.5 * (q1 * x[0] * x[0] + q2 * x[1] * x[1])); }, true,
        "aniso_gaussian");
}

}  // namespace

TEST_CASE("region geometry") {
    const auto disk = Region::ball(2, 1.5);
    double w = 0.0;
    for (const auto& n : disk.boundary_quadrature(50)) {
        w += n.weight;
        CHECK(std::fabs(norm(n.normal) - 1.0) < 1e-14);
    }
    CHECK(w == doctest::Approx(3 * kPi).epsilon(1e-14));

    const auto ball3 = Region::ball(3, 2.0);
    w = 0.0;
    for (const auto& n : ball3.boundary_quadrature(10)) {
        w += n.weight;
        CHECK(std::fabs(norm(n.normal) - 1.0) < 1e-14);
        // Outward: normal parallel to position.
        CHECK(n.x[0] * n.normal[0] + n.x[1] * n.normal[1] + n.x[2] * n.normal[2] == doctest::Approx(2.0));
    }
    CHECK(w == doctest::Approx(16 * kPi).epsilon(1e-13));

    const auto box = Region::axis_box({0, 0, 0}, {1, 2, 3});
    w = 0.0;
    for (const auto& n : box.boundary_quadrature(4)) w += n.weight;
    CHECK(w == doctest::Approx(22.0).epsilon(1e-13));
    CHECK(box.volume() == doctest::Approx(6.0));

    const auto ann = Region::annulus(2, 0.5, 1.0);
    CHECK(ann.boundary_measure() == doctest::Approx(3 * kPi));
    for (const auto& n : ann.boundary_quadrature(8)) {
        const double radial = n.x[0] * n.normal[0] + n.x[1] * n.normal[1];
        CHECK((norm(n.x) > 0.75 ? radial > 0 : radial < 0));
    }
    const auto comp = disk.complement();
    CHECK(comp.contains(std::vector<double>{2.0, 0.0}));
    CHECK_FALSE(comp.contains(std::vector<double>{0.0, 0.0}));
    CHECK(comp.boundary_quadrature(4)[0].normal[0] == doctest::Approx(-disk.boundary_quadrature(4)[0].normal[0]));
}

TEST_CASE("covariograms against lattice counts") {
    for (const auto& reg : {Region::ball(2, 1.0), Region::annulus(2, 0.4, 1.0), Region::axis_box({-1, -0.5}, {1, 0.5})}) {
        for (double zx : {0.0, 0.3, 0.9}) {
            const std::vector<double> z{zx, 0.2};
            const int n = 1200;
            const double h = 3.0 / n;
            double count = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const std::vector<double> x{-1.5 + (i + 0.5) * h, -1.5 + (j + 0.5) * h};
                    const std::vector<double> y{x[0] - z[0], x[1] - z[1]};
                    if (reg.contains(x) && reg.contains(y)) count += h * h;
                }
            CHECK(reg.covariogram(z) == doctest::Approx(count).epsilon(5e-3));
        }
    }
    // Ball in d = 3 at zero shift is the volume.
    CHECK(Region::ball(3, 1.0).covariogram(std::vector<double>{0, 0, 0}) == doctest::Approx(4 * kPi / 3));
    CHECK(lens_volume(3, 1.0, 1.0, 1.0) == doctest::Approx(5 * kPi / 12));
}

TEST_CASE("parse_region") {
    CHECK(parse_region("ball:2", 2).radius() == 2.0);
    CHECK(parse_region("complement:box:1,2", 2).complemented());
    CHECK(parse_region("annulus:0.5:1", 3).boundary_measure() == doctest::Approx(4 * kPi * 1.25));
    CHECK_THROWS(parse_region("torus:1", 2));
}

TEST_CASE("kernel transform") {
    const auto g = Symbol::gaussian(2);
    const KernelTransform kt(g, 12.0);
    for (double z : {0.0, 0.5, 2.0, 5.0, 12.0})
        CHECK(std::fabs(kt(z) - std::exp(-0.5 * z * z) / (2 * kPi)) < 1e-10);
    CHECK(kernel_transform(Symbol::limit_fermi(Hamiltonian::quadratic(2)), std::vector<double>{0.0, 0.0}) ==
          doctest::Approx(std::log(2.0) / (2 * kPi)).epsilon(1e-10));
    const KernelTransform k3(Symbol::gaussian(3), 6.0);
    for (double z : {0.0, 1.0, 4.0}) CHECK(std::fabs(k3(z) - std::exp(-0.5 * z * z) * std::pow(2 * kPi, -1.5)) < 1e-10);
    const auto an = anisotropic_gaussian(1.0, 2.0);
    const KernelTransform ka(an, 3.0);
    const std::vector<double> z{1.0, 0.5};
    // Inverse covariance diag(1, 1/2).
    const double expect = std::exp(-0.5 * (1.0 + 0.25 / 2.0)) / (2 * kPi * std::sqrt(2.0));
    CHECK(std::fabs(ka(z) - expect) < 1e-10);
    const auto odd = Symbol::custom(2, [](Point x) { return x[0]; }, false, "odd");
    CHECK_THROWS(KernelTransform(odd, 1.0));
}

TEST_CASE("a_functional Gaussian quadratic") {
    const auto g = Symbol::gaussian(2);
    const auto r = a_functional(g, {1.0, 0.0}, EntropyFunction::quadratic());
    CHECK(r.value == doctest::Approx(-1.0 / (4 * std::sqrt(kPi))).epsilon(1e-8));
    CHECK(r.method == Method::pv_quadrature);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    const auto f = EntropyFunction::von_neumann();
    const auto lf = Symbol::limit_fermi(Hamiltonian::quadratic(2));
    const double a1 = a_functional(lf, {nd(rng), nd(rng)}, f).value;
    const double a2 = a_functional(lf, {nd(rng), nd(rng)}, f).value;
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-6));
    CHECK(a_functional(g, {0.3, 0.7}, EntropyFunction::affine(2.0, 1.0)).value == 0.0);
}

TEST_CASE("a_functional on a non-radial symbol") {
    const auto an = anisotropic_gaussian(1.0, 2.0);
    QuadratureSpec q;
    q.nodes_perp = 64;
    for (const std::vector<double>& e : {std::vector<double>{1, 0}, std::vector<double>{0, 1},
                                         std::vector<double>{0.6, 0.8}}) {
        const auto r = a_functional(an, e, EntropyFunction::quadratic(), q);
        CHECK(r.value == doctest::Approx(gaussian_a_oracle(1.0, 2.0, e)).epsilon(1e-6));
    }
    // Box [-1,1]²: four unit-normal faces of length 2 in each direction.
    const auto box = Region::axis_box({-1, -1}, {1, 1});
    const double expect = (4 * gaussian_a_oracle(1, 2, {1, 0}) + 4 * gaussian_a_oracle(1, 2, {0, 1})) / (2 * kPi);
    CHECK(b_coefficient(an, box, EntropyFunction::quadratic(), q).value == doctest::Approx(expect).epsilon(1e-6));
    CHECK(b_coefficient(an, box.complement(), EntropyFunction::quadratic(), q).value ==
          doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("b_coefficient structure") {
    const auto g = Symbol::gaussian(2);
    const auto disk = Region::ball(2, 1.0);
    CHECK(b_coefficient(g, disk, EntropyFunction::quadratic()).value ==
          doctest::Approx(-1.0 / (4 * std::sqrt(kPi))).epsilon(1e-8));
    const auto half = Region::half_space({1.0, 0.0});
    CHECK(b_coefficient(g, half, EntropyFunction::quadratic()).value ==
          doctest::Approx(-1.0 / (8 * std::pow(kPi, 1.5))).epsilon(1e-8));

    const auto lf = Symbol::limit_fermi(Hamiltonian::quadratic(2));
    const auto f = EntropyFunction::von_neumann();
    const auto b = b_coefficient(lf, disk, f);
    CHECK(b.value > 0.0);
    CHECK(b_coefficient(lf, disk.complement(), f).value == b.value);
    QuadratureSpec fine;
    fine.pv_cutoff = 5e-3;
    fine.nodes_perp = 64;
    fine.nodes_x = 96;
    fine.nodes_t = 64;
    CHECK(b_coefficient(lf, disk, f, fine).value == doctest::Approx(b.value).epsilon(1e-2));
    CHECK(b_coefficient(lf, disk, EntropyFunction::affine(3.0, -1.0)).value == 0.0);

    // Positivity for concave η_γ.
    for (double gamma : {0.5, 1.5, 2.0})
        CHECK(b_coefficient(lf, disk, EntropyFunction::renyi(gamma)).value > 0.0);

    // Linearity in f.
    const auto f1 = EntropyFunction::renyi(0.5), f2 = EntropyFunction::quadratic();
    const auto combo = EntropyFunction::custom([&](double t) { return 2.0 * f1(t) - 0.5 * f2(t); }, {0.0, 1.0}, 0.5,
                                               "combo");
    const double lin = 2.0 * b_coefficient(lf, disk, f1).value - 0.5 * b_coefficient(lf, disk, f2).value;
    CHECK(b_coefficient(lf, disk, combo).value == doctest::Approx(lin).epsilon(1e-7));

    // (1-λ) a with f = t² scales as (1-λ)².
    const double b0 = b_coefficient(lf, disk, f2).value;
    for (double l : {0.25, 0.5})
        CHECK(b_coefficient(lf.scaled(1 - l), disk, f2).value == doctest::Approx((1 - l) * (1 - l) * b0).epsilon(1e-10));
}

TEST_CASE("parseval route") {
    const auto disk = Region::ball(2, 1.0);
    const auto g = Symbol::gaussian(2);
    const auto p = b_parseval_quadratic(g, disk, 1.0);
    CHECK(p.method == Method::parseval);
    CHECK(p.value == doctest::Approx(b_coefficient(g, disk, EntropyFunction::quadratic()).value).epsilon(5e-3));
    CHECK(b_parseval_quadratic(g, disk, 0.0).value == 0.0);
    const auto g3 = Symbol::gaussian(3);
    const auto ball = Region::ball(3, 1.0);
    CHECK(b_parseval_quadratic(g3, ball, 1.0).value ==
          doctest::Approx(b_coefficient(g3, ball, EntropyFunction::quadratic()).value).epsilon(5e-3));
    const auto lf = Symbol::limit_fermi(Hamiltonian::quadratic(2));
    CHECK(b_parseval_quadratic(lf, disk, 2.0).value ==
          doctest::Approx(b_coefficient(lf, disk, EntropyFunction::quadratic(2.0)).value).epsilon(5e-3));
    CHECK_THROWS(b_parseval_quadratic(anisotropic_gaussian(1, 2), disk, 1.0));
}

TEST_CASE("sigma series") {
    const auto s2 = sigma_series(2, 1e-10);
    const auto s3 = sigma_series(3, 1e-10);
    CHECK(s2.value == doctest::Approx(0.19798).epsilon(1e-3));
    CHECK(s3.value == doctest::Approx(0.15419).epsilon(1e-3));
    CHECK(std::fabs(s2.value - sigma_oracle(2)) < 1e-7);
    CHECK(std::fabs(s3.value - sigma_oracle(3)) < 1e-7);
    CHECK(std::fabs(sigma_series(4, 1e-10).value - sigma_oracle(4)) < 1e-7);
    CHECK(s2.method == Method::series);
    CHECK_THROWS(sigma_series(5, 1e-6));
    // Partial sums straddle the limit.
    const double first = std::pow(2.0, -1.5);
    const double second = first - 2.0 / std::sqrt(2.0) * std::pow(3.0, -1.5);
    CHECK((first - s2.value) * (second - s2.value) < 0.0);
}

TEST_CASE("closed forms") {
    CHECK(b_closed_form_gaussian(3, 2, 2 * kPi).value == doctest::Approx(-0.052893).epsilon(1e-4));
    CHECK(b_closed_form_gaussian(3, 3, 4 * kPi).value == doctest::Approx(-0.029842).epsilon(1e-4));
    CHECK(b_closed_form_gaussian(INFINITY, 2, 1).value == doctest::Approx(-std::pow(2.0, -5) * std::pow(kPi, -1.5)));
    CHECK_THROWS(b_closed_form_gaussian(1.5, 2, 1));
    const auto e2 = b_eta_infinity_gaussian(2, 2 * kPi);
    CHECK(e2.value == doctest::Approx(-0.039492).epsilon(1e-4));
    CHECK(b_eta_infinity_gaussian(3, 1).value == doctest::Approx(-0.0019528).epsilon(1e-4));
    CHECK(e2.value < 0.0);
    // The Σ formula agrees with direct quadrature of 𝓑(p_∞; -ln(1-·)).
    const auto lf = Symbol::limit_fermi(Hamiltonian::quadratic(2));
    CHECK(b_coefficient(lf, Region::ball(2, 1.0), EntropyFunction::neg_log1m()).value ==
          doctest::Approx(e2.value).epsilon(1e-6));
    // The quadratic Gaussian coefficient is twice the closed form.
    const double pv = b_coefficient(Symbol::gaussian(2), Region::ball(2, 1.0), EntropyFunction::effective(3.0)).value;
    CHECK(pv / b_closed_form_gaussian(3, 2, 2 * kPi).value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("continuity scan") {
    const auto h = Hamiltonian::perturbed_quadratic(2);
    auto family = [&](double l) {
        if (l == 0.0) return Symbol::limit_fermi(h);
        const double T = 1.0 / l;
        return Symbol::fermi(h, T, 0.0).dilated(std::sqrt(T));
    };
    const auto rows = continuity_scan(family, Region::ball(2, 1.0), EntropyFunction::von_neumann(), {0.5, 0.25, 0.125});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].deviation < rows[0].deviation);
    CHECK(rows[2].deviation < rows[1].deviation);

    const auto g = Symbol::gaussian(2);
    const auto flat = continuity_scan([&](double) { return g; }, Region::ball(2, 1.0), EntropyFunction::quadratic(), {0.5, 0.1});
    for (const auto& r : flat) CHECK(r.deviation == 0.0);
}

TEST_CASE("coefficient json round trip") {
    auto r = b_coefficient(Symbol::gaussian(2), Region::ball(2, 1.0), EntropyFunction::quadratic());
    r.note = "check";
    const auto back = CoefficientResult::from_json(nlohmann::json::parse(r.to_json().dump()));
    CHECK(back == r);
    CHECK(r.to_json().contains("symbol_tag"));
}
