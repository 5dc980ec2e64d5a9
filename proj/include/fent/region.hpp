#pragma once

#include <string>
#include <vector>

#include "fent/thermo.hpp"

namespace fent {

enum class Shape { ball, axis_box, annulus, half_space };

struct BoundaryNode {
    std::vector<double> x;
    std::vector<double> normal;  // outward from Λ
    double weight;
};

// Catalog truncating sets. Annuli are centred at the origin; the half-space
// {x·n < 0} only serves per-unit-boundary oracles.
class Region {
public:
    static Region ball(std::vector<double> center, double R);
    static Region ball(int d, double R) { return ball(std::vector<double>(d, 0.0), R); }
    static Region axis_box(std::vector<double> lo, std::vector<double> hi);
    static Region annulus(int d, double R_in, double R_out);
    static Region half_space(std::vector<double> normal);

    // ℝ^d minus the closure of Λ. Normals flip; the boundary is shared.
    Region complement() const;

    int dimension() const { return d_; }
    Shape shape() const { return shape_; }
    bool complemented() const { return complement_; }
    bool bounded() const { return !complement_ && shape_ != Shape::half_space; }

    double volume() const;
    // |∂Λ|; 1 for the half-space (per unit boundary).
    double boundary_measure() const;
    // Weights sum to |∂Λ|. n controls the resolution per boundary piece.
    std::vector<BoundaryNode> boundary_quadrature(int n) const;
    bool contains(Point x) const;
    // |Λ ∩ (Λ + z)| for the uncomplemented bounded shape.
    double covariogram(Point z) const;
    // Smallest geometric length scale (radius, side, ring width).
    double feature_size() const;
    std::vector<double> lower() const;
    std::vector<double> upper() const;
    // Radius of the smallest origin-centred ball containing Λ's boundary.
    double outer_radius() const;
    std::string tag() const;

    const std::vector<double>& center() const { return center_; }
    double radius() const { return r_out_; }
    double inner_radius() const { return r_in_; }
    const std::vector<double>& normal() const { return normal_; }

private:
    Shape shape_ = Shape::ball;
    int d_ = 2;
    bool complement_ = false;
    std::vector<double> center_, lo_, hi_, normal_;
    double r_in_ = 0.0, r_out_ = 0.0;
};

// CLI tags: ball:R, box:L1,L2[,L3] (centred), annulus:Rin:Rout, halfplane,
// each optionally prefixed by "complement:".
Region parse_region(const std::string& tag, int d);

// |B_{r1}(0) ∩ B_{r2}(z)| with |z| = dist, d ∈ {2, 3}.
double lens_volume(int d, double r1, double r2, double dist);

}  // namespace fent
