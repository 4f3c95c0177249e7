#pragma once

#include "spherecurve/core.hpp"

#include <functional>
#include <vector>

namespace spherecurve {

// arccot with values in [0, pi]; arccot(+inf) = 0, arccot(-inf) = pi.
double arccot(double kappa);
// cot with cot(0) = +inf and cot(pi) = -inf.
double cot_radius(double rho);

struct CurvatureBounds {
    double kappa1 = -kInf, kappa2 = kInf;
    double rho1 = kPi, rho2 = 0;

    static CurvatureBounds make(double kappa1, double kappa2);
    static CurvatureBounds from_radii(double rho1, double rho2);

    double rho0() const { return rho1 - rho2; }
    bool contains(double kappa) const { return kappa > kappa1 && kappa < kappa2; }
    // Distance of a radius of curvature to the excluded ends, in radians.
    double rho_margin(double rho) const { return std::min(rho - rho2, rho1 - rho); }
};

// h(t) = t - 1/t on (0, inf) and its inverse.
double speed_transform(double v);
double speed_transform_inv(double y);
// h_{kappa1,kappa2}: (kappa1, kappa2) -> R and its inverse.
double curvature_transform(const CurvatureBounds& b, double kappa);
double curvature_transform_inv(const CurvatureBounds& b, double y);

struct ControlTransforms {
    std::function<double(double)> h, h_inv, h_bounds, h_bounds_inv;
};
ControlTransforms control_transforms(const CurvatureBounds& b);

struct ControlPair {
    std::vector<double> v_hat, w_hat;  // one value per grid interval
};

// A curve with piecewise-constant speed and curvature. Segment i spans
// [t[i], t[i+1]] with duration h[i]; z[i] is the lifted frame at node i.
struct AdmissibleCurve {
    CurvatureBounds bounds;
    std::vector<double> h, v, kappa;
    std::vector<double> t;
    std::vector<Quat> z;
    bool closed = false;

    int segments() const { return static_cast<int>(h.size()); }
    int nodes() const { return static_cast<int>(z.size()); }
    double domain() const { return t.back(); }

    Mat3 frame(int i) const { return quat_to_rotation(z[i]); }
    Vec3 point(int i) const { return frame(i).col(0); }
    Vec3 tangent(int i) const { return frame(i).col(1); }
    Vec3 normal(int i) const { return frame(i).col(2); }
    double rho(int seg) const { return arccot(kappa[seg]); }
    // Radius of curvature attached to a node (the segment starting there; the last
    // node uses the last segment).
    double node_rho(int i) const { return rho(std::min(i, segments() - 1)); }
    // Body angular velocity (w, 0, v); the lifted equation is z' = z (omega/2).
    Vec3 omega(int seg) const { return {v[seg] * kappa[seg], 0.0, v[seg]}; }

    int segment_at(double s) const;
    Quat lift_at(double s) const;
    Mat3 frame_at(double s) const { return quat_to_rotation(lift_at(s)); }
};

// Integrate the frame equation with exact per-segment exponentials.
AdmissibleCurve build_curve(const CurvatureBounds& bounds, std::vector<double> h, std::vector<double> v,
                            std::vector<double> kappa, const Quat& z0, double closure_tol = 1e-7);

AdmissibleCurve integrate_curve(const ControlPair& controls, const CurvatureBounds& bounds,
                                const Mat3& Q0 = Mat3::Identity());

// Sample speed and curvature functions of t in [0,1] at interval midpoints.
AdmissibleCurve curve_from_functions(const CurvatureBounds& bounds, const std::function<double(double)>& v,
                                     const std::function<double(double)>& kappa, int N,
                                     const Mat3& Q0 = Mat3::Identity());

AdmissibleCurve make_circle(double rho, int k, const CurvatureBounds& bounds, int N = 1024);

double total_curvature(const AdmissibleCurve& c);
double length(const AdmissibleCurve& c);
AdmissibleCurve reparametrize_by_curvature(const AdmissibleCurve& c);
AdmissibleCurve reparametrize_arclength(const AdmissibleCurve& c);

// +1 if z(1) = z(0), -1 if z(1) = -z(0).
int lift_parity(const AdmissibleCurve& c);
double closure_defect(const AdmissibleCurve& c);

struct RadiusRange {
    double min = kPi, max = 0;
};
RadiusRange radius_range(const AdmissibleCurve& c);
// Smallest distance of a segment radius of curvature to the excluded ends of `b`.
double curvature_margin(const AdmissibleCurve& c, const CurvatureBounds& b);

AdmissibleCurve with_bounds(AdmissibleCurve c, const CurvatureBounds& b);
AdmissibleCurve rotate_curve(const AdmissibleCurve& c, const Quat& q);
// Left-multiplies by the inverse initial frame so that Phi(0) = I.
AdmissibleCurve normalize_start(const AdmissibleCurve& c);
// Splits every segment into `factor` equal pieces.
AdmissibleCurve refine(const AdmissibleCurve& c, int factor);
// Splits segments so that each has turning v h K at most `max_turn`.
AdmissibleCurve densify(const AdmissibleCurve& c, double max_turn);
// Rescales the parameter domain to [0, T].
AdmissibleCurve rescale_domain(const AdmissibleCurve& c, double T);

// Small smooth correction of speed and curvature so that Phi(end) = Phi(0); for
// curves rebuilt from geometric samples whose discretization leaves a gap.
AdmissibleCurve close_by_correction(const AdmissibleCurve& c, double tol = 1e-13);

// Import of a closed polyline: arc-length fit, circumcircle curvature, closure
// correction. Curvature outside the bounds by more than `slack` is rejected.
AdmissibleCurve curve_from_points(const std::vector<Vec3>& points, const CurvatureBounds& bounds,
                                  double slack = 1e-6);

// Signed radius data of the circle through three points; returns (center, rho).
std::pair<Vec3, double> circle_through(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace spherecurve
