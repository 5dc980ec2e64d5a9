#include "fent/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fent {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dimension(int d) {
    if (d < 2 || d > 3) throw std::invalid_argument("region dimension must be 2 or 3");
}

// Nodes on a sphere of radius R: uniform in angle (d=2), Gauss–Legendre in
// cos θ times uniform φ (d=3). Normals point away from the centre.
std::vector<BoundaryNode> sphere_nodes(const std::vector<double>& c, double R, int n, double sign) {
    std::vector<BoundaryNode> out;
    const int d = static_cast<int>(c.size());
    if (d == 2) {
        for (int k = 0; k < n; ++k) {
            const double th = 2 * kPi * (k + 0.5) / n;
            const double nx = std::cos(th), ny = std::sin(th);
            out.push_back({{c[0] + R * nx, c[1] + R * ny}, {sign * nx, sign * ny}, 2 * kPi * R / n});
        }
        return out;
    }
    const Rule gl = gauss_legendre(n, -1.0, 1.0);
    const int nphi = 2 * n;
    for (int i = 0; i < n; ++i) {
        const double ct = gl.x[i], st = std::sqrt(1.0 - ct * ct);
        for (int k = 0; k < nphi; ++k) {
            const double ph = 2 * kPi * (k + 0.5) / nphi;
            const double nx = st * std::cos(ph), ny = st * std::sin(ph), nz = ct;
            out.push_back({{c[0] + R * nx, c[1] + R * ny, c[2] + R * nz},
                           {sign * nx, sign * ny, sign * nz},
                           R * R * gl.w[i] * 2 * kPi / nphi});
        }
    }
    return out;
}

double ball_covariogram(int d, double R, double rho) {
    if (rho >= 2 * R) return 0.0;
    if (d == 2) return 2 * R * R * std::acos(rho / (2 * R)) - 0.5 * rho * std::sqrt(4 * R * R - rho * rho);
    return kPi / 12.0 * (4 * R + rho) * (2 * R - rho) * (2 * R - rho);
}

}  // namespace

double lens_volume(int d, double r1, double r2, double dist) {
    check_dimension(d);
    if (dist >= r1 + r2) return 0.0;
    const double rmin = std::min(r1, r2);
    if (dist <= std::fabs(r1 - r2)) return ball_volume(d) * std::pow(rmin, d);
    if (d == 2) {
        const double c1 = std::clamp((dist * dist + r1 * r1 - r2 * r2) / (2 * dist * r1), -1.0, 1.0);
        const double c2 = std::clamp((dist * dist + r2 * r2 - r1 * r1) / (2 * dist * r2), -1.0, 1.0);
        const double k = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2);
        return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(0.0, k));
    }
    const double s = r1 + r2 - dist;
    return kPi * s * s * (dist * dist + 2 * dist * (r1 + r2) - 3 * (r1 - r2) * (r1 - r2)) / (12 * dist);
}

Region Region::ball(std::vector<double> center, double R) {
    check_dimension(static_cast<int>(center.size()));
    if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");
    Region r;
    r.shape_ = Shape::ball;
    r.d_ = static_cast<int>(center.size());
    r.center_ = std::move(center);
    r.r_out_ = R;
    return r;
}

Region Region::axis_box(std::vector<double> lo, std::vector<double> hi) {
    check_dimension(static_cast<int>(lo.size()));
    if (lo.size() != hi.size()) throw std::invalid_argument("box corners differ in dimension");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(hi[i] > lo[i])) throw std::invalid_argument("box must have positive side lengths");
    Region r;
    r.shape_ = Shape::axis_box;
    r.d_ = static_cast<int>(lo.size());
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
}

Region Region::annulus(int d, double R_in, double R_out) {
    check_dimension(d);
    if (!(R_in > 0.0) || !(R_out > R_in)) throw std::invalid_argument("annulus needs 0 < R_in < R_out");
    Region r;
    r.shape_ = Shape::annulus;
    r.d_ = d;
    r.center_.assign(d, 0.0);
    r.r_in_ = R_in;
    r.r_out_ = R_out;
    return r;
}

Region Region::half_space(std::vector<double> normal) {
    check_dimension(static_cast<int>(normal.size()));
    const double n = norm(normal);
    if (!(n > 0.0)) throw std::invalid_argument("half-space normal must be nonzero");
    for (double& v : normal) v /= n;
    Region r;
    r.shape_ = Shape::half_space;
    r.d_ = static_cast<int>(normal.size());
    r.normal_ = std::move(normal);
    return r;
}

Region Region::complement() const {
    Region r = *this;
    r.complement_ = !complement_;
    return r;
}

double Region::volume() const {
    if (!bounded()) return std::numeric_limits<double>::infinity();
    switch (shape_) {
    case Shape::ball:
        return ball_volume(d_) * std::pow(r_out_, d_);
    case Shape::annulus:
        return ball_volume(d_) * (std::pow(r_out_, d_) - std::pow(r_in_, d_));
    case Shape::axis_box: {
        double v = 1.0;
        for (int i = 0; i < d_; ++i) v *= hi_[i] - lo_[i];
        return v;
    }
    default:
        return std::numeric_limits<double>::infinity();
    }
}

double Region::boundary_measure() const {
    switch (shape_) {
    case Shape::ball:
        return sphere_area(d_) * std::pow(r_out_, d_ - 1);
    case Shape::annulus:
        return sphere_area(d_) * (std::pow(r_out_, d_ - 1) + std::pow(r_in_, d_ - 1));
    case Shape::axis_box: {
        double s = 0.0;
        for (int i = 0; i < d_; ++i) {
            double face = 1.0;
            for (int j = 0; j < d_; ++j)
                if (j != i) face *= hi_[j] - lo_[j];
            s += 2 * face;
        }
        return s;
    }
    case Shape::half_space:
        return 1.0;
    }
    return 0.0;
}

std::vector<BoundaryNode> Region::boundary_quadrature(int n) const {
    if (n < 1) throw std::invalid_argument("boundary_quadrature: n must be positive");
    const double flip = complement_ ? -1.0 : 1.0;
    std::vector<BoundaryNode> out;
    switch (shape_) {
    case Shape::ball:
        return sphere_nodes(center_, r_out_, n, flip);
    case Shape::annulus: {
        out = sphere_nodes(center_, r_out_, n, flip);
        auto inner = sphere_nodes(center_, r_in_, n, -flip);
        out.insert(out.end(), inner.begin(), inner.end());
        return out;
    }
    case Shape::half_space: {
        std::vector<double> nrm = normal_;
        for (double& v : nrm) v *= flip;
        out.push_back({std::vector<double>(d_, 0.0), nrm, 1.0});
        return out;
    }
    case Shape::axis_box:
        break;
    }
    // Faces: tensor Gauss–Legendre on each, corners skipped.
    for (int i = 0; i < d_; ++i) {
        std::vector<Rule> rules;
        std::vector<int> axes;
        for (int j = 0; j < d_; ++j)
            if (j != i) {
                rules.push_back(gauss_legendre(n, lo_[j], hi_[j]));
                axes.push_back(j);
            }
        for (double side : {-1.0, 1.0}) {
            std::vector<double> nrm(d_, 0.0);
            nrm[i] = side * flip;
            const double xi = side < 0 ? lo_[i] : hi_[i];
            if (d_ == 2) {
                for (int a = 0; a < n; ++a) {
                    std::vector<double> x(2);
                    x[i] = xi;
                    x[axes[0]] = rules[0].x[a];
                    out.push_back({x, nrm, rules[0].w[a]});
                }
            } else {
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        std::vector<double> x(3);
                        x[i] = xi;
                        x[axes[0]] = rules[0].x[a];
                        x[axes[1]] = rules[1].x[b];
                        out.push_back({x, nrm, rules[0].w[a] * rules[1].w[b]});
                    }
            }
        }
    }
    return out;
}

bool Region::contains(Point x) const {
    bool inside = false;
    switch (shape_) {
    case Shape::ball:
    case Shape::annulus: {
        double r2 = 0.0;
        for (int i = 0; i < d_; ++i) r2 += (x[i] - center_[i]) * (x[i] - center_[i]);
        inside = r2 < r_out_ * r_out_ && (shape_ == Shape::ball || r2 > r_in_ * r_in_);
        break;
    }
    case Shape::axis_box:
        inside = true;
        for (int i = 0; i < d_; ++i) inside = inside && x[i] > lo_[i] && x[i] < hi_[i];
        break;
    case Shape::half_space: {
        double s = 0.0;
        for (int i = 0; i < d_; ++i) s += x[i] * normal_[i];
        inside = s < 0.0;
        break;
    }
    }
    return complement_ ? !inside : inside;
}

double Region::covariogram(Point z) const {
    if (!bounded()) throw std::invalid_argument("covariogram needs a bounded region");
    const double rho = norm(z);
    switch (shape_) {
    case Shape::ball:
        return ball_covariogram(d_, r_out_, rho);
    case Shape::annulus:
        return ball_covariogram(d_, r_out_, rho) - 2 * lens_volume(d_, r_out_, r_in_, rho) +
               ball_covariogram(d_, r_in_, rho);
    case Shape::axis_box: {
        double v = 1.0;
        for (int i = 0; i < d_; ++i) v *= std::max(0.0, hi_[i] - lo_[i] - std::fabs(z[i]));
        return v;
    }
    default:
        return 0.0;
    }
}

double Region::feature_size() const {
    switch (shape_) {
    case Shape::ball:
        return r_out_;
    case Shape::annulus:
        return std::min(r_in_, r_out_ - r_in_);
    case Shape::axis_box: {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d_; ++i) m = std::min(m, hi_[i] - lo_[i]);
        return m;
    }
    default:
        return std::numeric_limits<double>::infinity();
    }
}

std::vector<double> Region::lower() const {
    if (shape_ == Shape::axis_box) return lo_;
    if (shape_ == Shape::half_space) return std::vector<double>(d_, -std::numeric_limits<double>::infinity());
    std::vector<double> v(center_);
    for (double& c : v) c -= r_out_;
    return v;
}

std::vector<double> Region::upper() const {
    if (shape_ == Shape::axis_box) return hi_;
    if (shape_ == Shape::half_space) return std::vector<double>(d_, std::numeric_limits<double>::infinity());
    std::vector<double> v(center_);
    for (double& c : v) c += r_out_;
    return v;
}

double Region::outer_radius() const {
    const auto lo = lower(), hi = upper();
    double s = 0.0;
    for (int i = 0; i < d_; ++i) {
        const double m = std::max(std::fabs(lo[i]), std::fabs(hi[i]));
        s += m * m;
    }
    return std::sqrt(s);
}

std::string Region::tag() const {
    std::ostringstream os;
    os.precision(10);
    if (complement_) os << "complement:";
    switch (shape_) {
    case Shape::ball:
        os << "ball(R=" << r_out_ << ",d=" << d_ << ")";
        break;
    case Shape::annulus:
        os << "annulus(" << r_in_ << "," << r_out_ << ",d=" << d_ << ")";
        break;
    case Shape::axis_box:
        os << "box(";
        for (int i = 0; i < d_; ++i) os << (i ? "x" : "") << hi_[i] - lo_[i];
        os << ")";
        break;
    case Shape::half_space:
        os << "half_space(d=" << d_ << ")";
        break;
    }
    return os.str();
}

Region parse_region(const std::string& tag, int d) {
    const std::string prefix = "complement:";
    if (tag.rfind(prefix, 0) == 0) return parse_region(tag.substr(prefix.size()), d).complement();
    auto numbers = [](const std::string& s) {
        std::vector<double> v;
        std::string cur;
        for (char c : s + ",") {
            if (c == ',' || c == ':') {
                if (!cur.empty()) v.push_back(std::stod(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        return v;
    };
    const auto colon = tag.find(':');
    const std::string name = tag.substr(0, colon);
    const std::vector<double> args = colon == std::string::npos ? std::vector<double>{} : numbers(tag.substr(colon + 1));
    if (name == "ball" && args.size() == 1) return Region::ball(d, args[0]);
    if (name == "annulus" && args.size() == 2) return Region::annulus(d, args[0], args[1]);
    if (name == "halfplane" || name == "half_space") {
        std::vector<double> n(d, 0.0);
        n[0] = 1.0;
        return Region::half_space(n);
    }
    if (name == "box" && (args.size() == 1 || static_cast<int>(args.size()) == d)) {
        std::vector<double> lo(d), hi(d);
        for (int i = 0; i < d; ++i) {
            const double L = args.size() == 1 ? args[0] : args[i];
            lo[i] = -0.5 * L;
            hi[i] = 0.5 * L;
        }
        return Region::axis_box(lo, hi);
    }
    throw std::invalid_argument("unknown region tag: " + tag);
}

}  // namespace fent
