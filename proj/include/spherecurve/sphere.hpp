#pragma once

#include "spherecurve/core.hpp"

#include <optional>
#include <vector>

namespace spherecurve {

using Vec2 = Eigen::Vector2d;

// Orthonormal basis (v1, v2) of the plane orthogonal to `pole`, with v1 x v2 = pole.
struct PlaneFrame {
    Vec3 pole, v1, v2;
};
PlaneFrame projection_frame(const Vec3& pole);

// Stereographic projection from `pole` onto the plane through the origin.
Vec2 stereographic(const Vec3& p, const Vec3& pole);
Vec3 unstereographic(const Vec2& x, const Vec3& pole);
// Image of the tangent vector `dp` at p under the differential of the projection.
Vec2 stereographic_differential(const Vec3& p, const Vec3& dp, const Vec3& pole);

// T_r(p) = pr^-1(r pr(p)), pr projecting from `pole`; fixes pole and -pole.
Vec3 mobius_dilate(const Vec3& p, double r, const Vec3& pole);

struct HemisphereInfo {
    bool open = false;    // some h has min <p,h> > eps
    bool closed = false;  // some h != 0 has min <p,h> >= -eps
    Vec3 h = Vec3::Zero();
    // max over unit h of min <p,h>; exact up to solver tolerance when >= 0,
    // lattice-plus-refinement estimate when negative.
    double margin = 0;
};

HemisphereInfo hemisphere_info(const std::vector<Vec3>& points, const ToleranceProfile& tol = {});
std::optional<Vec3> hemisphere_feasible(const std::vector<Vec3>& points, bool closed,
                                        const ToleranceProfile& tol = {});
bool origin_in_hull_interior(const std::vector<Vec3>& points, const ToleranceProfile& tol = {});

struct SphericalSimplex {
    std::vector<Vec3> vertices;
    std::vector<double> weights;
    std::vector<int> indices;  // positions in the input list
};

SphericalSimplex containing_simplex(const std::vector<Vec3>& points, const Vec3& target,
                                    const ToleranceProfile& tol = {});

std::vector<Vec3> fibonacci_lattice(int n);

}  // namespace spherecurve
