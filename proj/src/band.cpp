#include "spherecurve/band.hpp"

#include <algorithm>
#include <cstdio>

namespace spherecurve {

Quat translation_quat(double theta) {
    return {std::cos(0.5 * theta), 0.0, -std::sin(0.5 * theta), 0.0};
}

Mat3 translation_matrix(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat3 R;
    R << c, 0, -s, 0, 1, 0, s, 0, c;
    return R;
}

AdmissibleCurve translate_curve(const AdmissibleCurve& c, double theta) {
    const RadiusRange rr = radius_range(c);
    const double pad = 1e-9;
    if (!(theta >= rr.max - kPi + pad && theta <= rr.min - pad))
        throw Error(ErrorCode::ThetaOutOfRange,
                    "theta must satisfy rho_max - pi < theta < rho_min for the curve's radii");
    const int N = c.segments();
    std::vector<double> v(N), kappa(N);
    for (int i = 0; i < N; ++i) {
        const double rho = c.rho(i);
        v[i] = c.v[i] * std::sin(rho - theta) / std::sin(rho);
        kappa[i] = cot_radius(rho - theta);
    }
    const double r1 = std::clamp(c.bounds.rho1 - theta, 0.0, kPi);
    const double r2 = std::clamp(c.bounds.rho2 - theta, 0.0, kPi);
    CurvatureBounds nb = CurvatureBounds::from_radii(r1, r2);
    return build_curve(nb, c.h, std::move(v), std::move(kappa), c.z[0] * translation_quat(theta));
}

Vec3 band_point_at(const AdmissibleCurve& c, double s, double theta) {
    Mat3 F = c.frame_at(s);
    return std::cos(theta) * F.col(0) + std::sin(theta) * F.col(2);
}

BandGrid band_grid(const AdmissibleCurve& c, double lo, double hi, int M) {
    BandGrid g;
    g.t = c.t;
    g.theta.resize(M);
    for (int j = 0; j < M; ++j) g.theta[j] = lo + (hi - lo) * j / (M - 1);
    g.points.resize(static_cast<size_t>(c.nodes()) * M);
    std::vector<double> cs(M), sn(M);
    for (int j = 0; j < M; ++j) {
        cs[j] = std::cos(g.theta[j]);
        sn[j] = std::sin(g.theta[j]);
    }
    for (int i = 0; i < c.nodes(); ++i) {
        Mat3 F = c.frame(i);
        for (int j = 0; j < M; ++j) g.points[static_cast<size_t>(i) * M + j] = cs[j] * F.col(0) + sn[j] * F.col(2);
    }
    return g;
}

BandGrid regular_band(const AdmissibleCurve& c, int M) {
    return band_grid(c, c.bounds.rho1 - kPi, c.bounds.rho2, M);
}

BandGrid caustic_band(const AdmissibleCurve& c, int M) {
    return band_grid(c, c.bounds.rho2, c.bounds.rho1, M);
}

std::vector<Vec3> caustic_curve(const AdmissibleCurve& c) {
    std::vector<Vec3> out(c.nodes());
    for (int i = 0; i < c.nodes(); ++i) out[i] = band_point(c, i, c.node_rho(i));
    return out;
}

std::string band_csv(const BandGrid& g) {
    std::string out = "t,theta,x,y,z\n";
    char buf[160];
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) {
            const Vec3& p = g.at(i, j);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.t[i], g.theta[j], p.x(), p.y(),
                          p.z());
            out += buf;
        }
    return out;
}

}  // namespace spherecurve
