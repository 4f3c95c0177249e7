#pragma once

#include "spherecurve/classify.hpp"

#include <complex>
#include <string>
#include <vector>

namespace spherecurve {

struct HomotopyPath {
    CurvatureBounds bounds;
    std::vector<double> s;
    std::vector<AdmissibleCurve> curves;
    std::string provenance;  // bending | loops | shrink | graft | planar | custom
};

struct ValidationReport {
    double min_margin = kInf;  // smallest distance of a radius of curvature to the excluded ends
    double max_defect = 0;     // largest closure defect
    std::vector<int> parity;   // 0 when the endpoint lifts are ambiguous
    bool pass = false;
};

ValidationReport validate_path(const HomotopyPath& path, const CurvatureBounds& bounds,
                               const ToleranceProfile& tol = {});

// Frame s in [0, 1] of the bending below; bounds (-kappa1, kappa1).
AdmissibleCurve bending_frame(int k, double s, double kappa1, int pieces_per_arc = 16);
// Equator traversed k times bent into the equator traversed k + 2 times.
HomotopyPath bend_k_equator(int k, int S, double kappa1, int pieces_per_arc = 16);

// Inserts n_loops turns of a circle of radius rho_small at gamma(t0); the parts of
// the curve within 2 epsilon of t0 are traversed at double speed.
AdmissibleCurve add_loops(const AdmissibleCurve& c, double t0, int n_loops, double rho_small, double epsilon);

// F_n(gamma)(t) = Phi_gamma(t) sigma_n(t) with gamma parametrized proportionally to
// its total curvature on [0, 1].
AdmissibleCurve spread_loops(const AdmissibleCurve& c, int n, double rho1, int samples_per_loop = 64);

// Circle of radius rho1 through e1 with frame I at t = 0, traversed n times.
Vec3 loop_circle(double rho1, double u);

using Complex = std::complex<double>;

// Closed plane curve eta(t) = start + int_0^t (L z exp(i theta) - m), with theta
// piecewise linear on `t`, theta(0) = 0, theta(1) = 2 pi N and m the mean of
// L z exp(i theta).
struct PlanarCurve {
    std::vector<double> t;
    std::vector<double> theta;
    double L = 1;
    Complex z{1, 0};
    Complex start{0, 0};

    int turns() const;
    Complex mean_velocity() const;
    Complex point(double u) const;
    Complex velocity(double u) const;
    Complex acceleration(double u) const;
    double curvature(double u) const;
    double min_curvature(int samples_per_piece = 2) const;
    double max_radius(int samples = 512) const;
};

// Angle interpolation toward 2 pi N t, with closure correction; L fixed.
std::vector<PlanarCurve> planar_wg_homotopy(const PlanarCurve& eta, int S);

// Lift of a small plane curve in the tangent plane at h (basis u1 x u2 = h) by
// the inverse of orthogonal projection.
AdmissibleCurve lift_planar(const PlanarCurve& eta, const Vec3& h, const CurvatureBounds& bounds, int M);

// Moebius dilatation T_r from -h applied to a curve, kept in place.
AdmissibleCurve dilate_curve(const AdmissibleCurve& c, double r, const Vec3& h);

// Homotopy from a condensed curve (kappa0 >= 0 after reduction) to a circle
// traversed nu times, through condensed curves.
HomotopyPath shrink_condensed(const AdmissibleCurve& c, int S = 65, const ToleranceProfile& tol = {});

}  // namespace spherecurve
