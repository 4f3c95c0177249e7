#include "spherecurve/classify.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spherecurve;

namespace {

// Closed curve with curvature 1.2 + a sin(2 pi m t), closed by correction; m >= 2
// since the correction absorbs the first harmonic.
AdmissibleCurve wavy(double a, int m, int N = 512) {
    return close_by_correction(curve_from_functions(
        CurvatureBounds::make(0, kInf), [](double) { return 2 * kPi * std::sin(0.7); },
        [&](double t) { return 1.2 + a * std::sin(2 * kPi * m * t); }, N));
}

double max_frame_gap(const AdmissibleCurve& a, const AdmissibleCurve& b) {
    double worst = 0;
    for (int i = 0; i < a.nodes(); ++i) worst = std::max(worst, (a.frame(i) - b.frame(i)).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace

TEST(Translate, ZeroIsIdentity) {
    const AdmissibleCurve c = wavy(0.4, 3);
    const AdmissibleCurve t = translate_curve(c, 0.0);
    EXPECT_LT(max_frame_gap(c, t), 1e-12);
}

TEST(Translate, CircleColatitudeShrinks) {
    const double alpha = 1.1;
    const AdmissibleCurve c = make_circle(alpha, 1, CurvatureBounds::make(-kInf, kInf), 256);
    const Vec3 center = std::cos(alpha) * c.point(0) + std::sin(alpha) * c.normal(0);
    for (double theta : {0.2, 0.5, 1.0}) {
        const AdmissibleCurve t = translate_curve(c, theta);
        for (int i = 0; i < t.nodes(); ++i) EXPECT_NEAR(angle_between(t.point(i), center), alpha - theta, 1e-12);
    }
}

TEST(Translate, FrameIdentityRadiusShiftAndRoundTrip) {
    const AdmissibleCurve c = wavy(0.4, 3);
    const RadiusRange rr = radius_range(c);
    for (double theta : {rr.max - kPi + 0.05, -0.3, 0.1, rr.min - 0.05}) {
        const AdmissibleCurve t = translate_curve(c, theta);
        const Mat3 R = translation_matrix(theta);
        for (int i = 0; i < c.nodes(); ++i) EXPECT_LT((t.frame(i) - c.frame(i) * R).cwiseAbs().maxCoeff(), 1e-9);
        for (int i = 0; i < c.segments(); ++i) EXPECT_NEAR(t.rho(i), c.rho(i) - theta, 1e-8);
        const AdmissibleCurve back = translate_curve(t, -theta);
        for (int i = 0; i < c.nodes(); ++i) EXPECT_LT((back.point(i) - c.point(i)).norm(), 1e-9);
    }
}

TEST(Translate, ComposesAdditively) {
    const AdmissibleCurve c = wavy(0.3, 2);
    const AdmissibleCurve a = translate_curve(translate_curve(c, 0.2), -0.5);
    const AdmissibleCurve b = translate_curve(c, -0.3);
    EXPECT_LT(max_frame_gap(a, b), 1e-9);
}

TEST(Translate, OutOfRangeThrows) {
    const AdmissibleCurve c = make_circle(0.5, 1, CurvatureBounds::make(0, kInf), 128);
    try {
        translate_curve(c, 0.6);
        FAIL() << "expected ThetaOutOfRange";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ThetaOutOfRange);
    }
}

TEST(Translate, ReductionRoundTripKeepsCircles) {
    const CurvatureBounds b = CurvatureBounds::make(-1, 1);
    for (int k = 1; k <= 3; ++k) {
        const AdmissibleCurve c = make_circle(1.9, k, b, 256);
        const ReducedCurve r = reduce_to_k0(c);
        EXPECT_NEAR(r.kappa0, 0, 1e-15);
        for (int i = 0; i < r.curve.segments(); ++i) EXPECT_NEAR(r.curve.kappa[i], r.curve.kappa[0], 1e-12);
        EXPECT_NEAR(total_curvature(reparametrize_arclength(r.curve)) / (2 * kPi), k, 1e-9);
        EXPECT_EQ(lift_parity(r.curve), lift_parity(c));
        const AdmissibleCurve back = translate_curve(r.curve, -b.rho2);
        for (int i = 0; i < c.nodes(); ++i) EXPECT_LT((back.point(i) - c.point(i)).norm(), 1e-9);
    }
}

TEST(RegularBand, FibersAreGeodesicArcs) {
    const AdmissibleCurve c = wavy(0.4, 3, 256);
    const BandGrid g = regular_band(c, 32);
    EXPECT_NEAR(g.theta.front(), c.bounds.rho1 - kPi, 1e-15);
    EXPECT_NEAR(g.theta.back(), c.bounds.rho2, 1e-15);
    for (int i = 0; i < g.rows(); ++i) {
        const Vec3 normal = c.point(i).cross(c.normal(i));
        for (int j = 0; j < g.cols(); ++j) EXPECT_LT(std::abs(g.at(i, j).dot(normal)), 1e-10);
        EXPECT_LT((g.at(i, g.cols() - 1) - c.point(i)).norm(), 1e-15);  // theta = rho2 = 0
    }
}

TEST(RegularBand, FiberDerivativeUnitAndPositivelyOriented) {
    const AdmissibleCurve c = wavy(0.4, 3, 256);
    const double h = 1e-6;
    const double lo = c.bounds.rho1 - kPi;
    for (int i = 1; i + 1 < c.nodes(); i += 7) {
        const double s = c.t[i] + 0.5 * c.h[i];
        for (double theta : {lo + 0.3, 0.5 * lo, -0.1}) {
            const Vec3 B = band_point_at(c, s, theta);
            const Vec3 Bth = (band_point_at(c, s, theta + h) - band_point_at(c, s, theta - h)) / (2 * h);
            const Vec3 Bt = (band_point_at(c, s + h, theta) - band_point_at(c, s - h, theta)) / (2 * h);
            EXPECT_NEAR(Bth.norm(), 1, 1e-5);
            EXPECT_LT(std::abs(Bth.dot(Bt)), 1e-5 * std::max(1.0, Bt.norm()));
            EXPECT_GT(B.dot(Bt.cross(Bth)), 0);
        }
    }
}

TEST(CausticBand, EdgesAreCurveAndCaustic) {
    const AdmissibleCurve c = wavy(0.4, 3, 256);
    const BandGrid g = caustic_band(c, 16);
    for (int i = 0; i < g.rows(); ++i) EXPECT_EQ(g.at(i, 0), c.point(i));
    const std::vector<Vec3> chi = caustic_curve(c);
    for (int i = 0; i < c.nodes(); ++i) {
        EXPECT_LT((band_point(c, i, c.node_rho(i)) - chi[i]).norm(), 1e-10);
        EXPECT_LT((std::cos(c.node_rho(i)) * c.point(i) + std::sin(c.node_rho(i)) * c.normal(i) - chi[i]).norm(),
                  1e-10);
    }
}

TEST(CausticBand, CircleCausticIsAPoint) {
    const AdmissibleCurve c = make_circle(0.8, 2, CurvatureBounds::make(0, kInf), 512);
    const std::vector<Vec3> chi = caustic_curve(c);
    double diam = 0;
    for (const Vec3& p : chi) diam = std::max(diam, (p - chi[0]).norm());
    EXPECT_LT(diam, 1e-8);
}

TEST(CausticCurve, MovesWhereCurvatureIsMonotone) {
    const AdmissibleCurve c = wavy(0.4, 2, 1024);
    const std::vector<Vec3> chi = caustic_curve(c);
    // kappa increases for u in (-1/8, 1/8); sample well inside.
    double slowest_monotone = kInf, slowest_flat = kInf;
    for (int i = 0; i + 1 < c.segments(); ++i) {
        const double u = (c.t[i] + 0.5 * c.h[i]) / c.domain();
        const double speed = (chi[i + 1] - chi[i]).norm() / c.h[i];
        const double dk = std::abs(c.kappa[i + 1] - c.kappa[i]) / c.h[i];
        if (u > 0.02 && u < 0.1) slowest_monotone = std::min(slowest_monotone, speed);
        if (dk < 1e-3) slowest_flat = std::min(slowest_flat, speed);
    }
    EXPECT_GT(slowest_monotone, 0.1);
    EXPECT_LT(slowest_flat, 0.1 * slowest_monotone);
}

TEST(BandCsv, HasHeaderAndOneRowPerSample) {
    const AdmissibleCurve c = make_circle(0.8, 1, CurvatureBounds::make(0, kInf), 32);
    const BandGrid g = regular_band(c, 4);
    const std::string csv = band_csv(g);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,theta,x,y,z");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + g.rows() * g.cols());
}
