#pragma once

#include "spherecurve/curve.hpp"

#include <string>
#include <vector>

namespace spherecurve {

// gamma_theta = cos(theta) gamma + sin(theta) n, with frame Phi R_theta.
AdmissibleCurve translate_curve(const AdmissibleCurve& c, double theta);
// Quaternion of R_theta (rotation about e2 by -theta).
Quat translation_quat(double theta);
Mat3 translation_matrix(double theta);

inline Vec3 band_point(const AdmissibleCurve& c, int node, double theta) {
    Mat3 F = c.frame(node);
    return std::cos(theta) * F.col(0) + std::sin(theta) * F.col(2);
}
Vec3 band_point_at(const AdmissibleCurve& c, double s, double theta);

struct BandGrid {
    std::vector<double> t;      // curve nodes
    std::vector<double> theta;  // uniform fiber nodes
    std::vector<Vec3> points;   // points[i * theta.size() + j] = B(t_i, theta_j)
    const Vec3& at(int i, int j) const { return points[i * theta.size() + j]; }
    int rows() const { return static_cast<int>(t.size()); }
    int cols() const { return static_cast<int>(theta.size()); }
};

BandGrid band_grid(const AdmissibleCurve& c, double theta_lo, double theta_hi, int M);
// Regular band over [rho1 - pi, rho2] and caustic band over [rho2, rho1] of the
// curve's bounds.
BandGrid regular_band(const AdmissibleCurve& c, int M = 64);
BandGrid caustic_band(const AdmissibleCurve& c, int M = 64);

// chi(t) = cos(rho) gamma + sin(rho) n at every node.
std::vector<Vec3> caustic_curve(const AdmissibleCurve& c);

std::string band_csv(const BandGrid& g);

}  // namespace spherecurve
