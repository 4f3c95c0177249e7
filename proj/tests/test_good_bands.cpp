#include "corpus.hpp"
#include "spherecurve/bands.hpp"

#include <gtest/gtest.h>

using namespace spherecurve;

namespace {

constexpr double kTau = 5e-3;
constexpr int kNodes = 512;

const CurvatureBounds& neg_bounds() {
    static const CurvatureBounds b = CurvatureBounds::make(-0.5, kInf);
    return b;
}

const CondensedBand& wobbly_band() {
    static const CondensedBand cb =
        band_from_condensed(corpus_data::wobbly_circle(1.0, 1, 0.1, 2, neg_bounds(), 512), 0.0, kNodes);
    return cb;
}

double max_gap(const AcceptableBand& a, const AcceptableBand& b) {
    double m = 0;
    for (int k = 0; k < a.nodes(); ++k)
        m = std::max({m, std::abs(a.theta_plus[k] - b.theta_plus[k]), std::abs(a.theta_minus[k] - b.theta_minus[k])});
    return m;
}

// Boundary latitude at longitude psi on the polyline through the nodes.
double boundary_at(const AcceptableBand& band, const std::vector<double>& theta, double psi) {
    const double u = std::fmod(psi / band.spacing(), band.nodes()) + (psi < 0 ? band.nodes() : 0);
    const int k = static_cast<int>(std::floor(u)) % band.nodes();
    const double f = u - std::floor(u);
    return (1 - f) * theta[k] + f * theta[(k + 1) % band.nodes()];
}

}  // namespace

TEST(BandFromCondensed, CirclesGiveConstantRowsOfWidthPiMinusRho0) {
    const CurvatureBounds& b = neg_bounds();
    for (int k = 1; k <= 3; ++k) {
        const CondensedBand cb = band_from_condensed(make_circle(1.0, k, b, 512), 0.0, kNodes);
        EXPECT_EQ(cb.band.nu, k);
        EXPECT_EQ(cb.band.nodes(), kNodes);
        EXPECT_NEAR(cb.band.R, kPi - b.rho0(), 1e-12);
        for (int i = 0; i < kNodes; ++i) {
            EXPECT_NEAR(cb.band.theta_plus[i], cb.band.theta_plus[0], 1e-7);
            EXPECT_NEAR(cb.band.theta_minus[i], cb.band.theta_minus[0], 1e-7);
        }
        EXPECT_NEAR(cb.distances.min, kPi - b.rho0(), 1e-3);
        EXPECT_NEAR(cb.distances.max, kPi - b.rho0(), 1e-3);
        EXPECT_TRUE(is_good(cb.band, kTau));
    }
}

TEST(BandFromCondensed, WobblyCurveIsGoodWithTheMeasuredWidth) {
    const CondensedBand& cb = wobbly_band();
    EXPECT_EQ(cb.band.nu, 1);
    double spread = 0;
    for (double t : cb.band.theta_plus) spread = std::max(spread, std::abs(t - cb.band.theta_plus[0]));
    EXPECT_GT(spread, 1e-2);  // not a symmetric band
    EXPECT_NEAR(cb.distances.min, cb.band.R, 1e-3);
    EXPECT_NEAR(cb.distances.max, cb.band.R, 1e-3);
    EXPECT_TRUE(is_good(cb.band, kTau));
}

TEST(BandFromCondensed, RejectsCurvesThatAreNotCondensed) {
    EXPECT_THROW(band_from_condensed(make_circle(2.0, 1, neg_bounds(), 256), 0.0, 256), Error);
}

TEST(Contract, EndpointsAndAcceptability) {
    const AcceptableBand& band = wobbly_band().band;
    EXPECT_EQ(max_gap(contract_band(band, 0), band), 0);
    const AcceptableBand full = contract_band(band, 1);
    for (int k = 0; k < full.nodes(); ++k) {
        EXPECT_DOUBLE_EQ(full.theta_plus[k], band.R);
        EXPECT_DOUBLE_EQ(full.theta_minus[k], -band.R);
    }
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) EXPECT_TRUE(is_acceptable(contract_band(band, s), kTau)) << s;
    EXPECT_THROW(contract_band(band, 1.5), Error);
}

TEST(Retract, GoodBandIsAFixedPoint) {
    const AcceptableBand& band = wobbly_band().band;
    const Retraction r = retract_to_good(band, kTau);
    EXPECT_LT(max_gap(r.band, band), kTau);
    EXPECT_TRUE(r.monotone);
}

TEST(Retract, MaximalBandRetractsMonotonicallyToAGoodBand) {
    const double R = 1.1;
    const Retraction r = retract_to_good(maximal_band(2, R, kNodes), kTau);
    EXPECT_TRUE(r.monotone);
    EXPECT_TRUE(is_good(r.band, kTau));
    const BandDistances d = boundary_distances(r.band);
    EXPECT_GE(d.min, R - kTau);
    EXPECT_LE(d.max, R + kTau);
    EXPECT_LT(r.changes.back(), kTau / 4);
    for (int k = 0; k < r.band.nodes(); ++k) {
        EXPECT_LE(r.band.theta_plus[k], R);
        EXPECT_GE(r.band.theta_minus[k], -R);
    }
}

TEST(Retract, ContractedBandsRetractToGoodBands) {
    const AcceptableBand& band = wobbly_band().band;
    for (double s : {0.25, 0.75}) {
        const Retraction r = retract_to_good(contract_band(band, s), kTau);
        EXPECT_TRUE(r.monotone) << s;
        EXPECT_TRUE(is_good(r.band, kTau)) << s;
    }
}

TEST(Symmetric, IsGood) {
    EXPECT_TRUE(is_good(symmetric_band(1, 1.0, kNodes), kTau));
    EXPECT_FALSE(is_good(maximal_band(1, 1.0, kNodes), kTau));
    EXPECT_TRUE(is_acceptable(maximal_band(1, 1.0, kNodes), kTau));
}

TEST(Central, SymmetricBandGivesACircleAtTheMidLatitude) {
    const CentralCurve cc = central_curve(symmetric_band(2, 1.0, kNodes));
    for (const Vec3& p : cc.points) EXPECT_NEAR(p.z(), 0, 1e-9);
    EXPECT_NEAR(cc.rho_min, kPi / 2, 1e-6);
    EXPECT_NEAR(cc.rho_max, kPi / 2, 1e-6);
    EXPECT_NEAR(total_curvature(cc.curve) / (2 * kPi), 2, 1e-3);
}

TEST(Central, RadiusOfCurvatureBoundAndTracks) {
    const CondensedBand& cb = wobbly_band();
    const CentralCurve cc = central_curve(cb.band, cb.frame);
    const double R = cb.band.R;
    EXPECT_GE(cc.rho_min, R / 2);
    EXPECT_LE(cc.rho_max, kPi - R / 2);
    EXPECT_GT(cc.margin, 0);
    EXPECT_TRUE(std::isfinite(cc.lipschitz));
    EXPECT_GT(cc.track_clearance, 0.5 * cb.band.spacing());
    EXPECT_TRUE(cc.curve.closed);
}

TEST(Central, TranslatesStayInsideTheBand) {
    const CondensedBand& cb = wobbly_band();
    const CentralCurve cc = central_curve(cb.band, cb.frame);
    const double reach = cb.band.R / 2 - 0.05;
    for (double theta : {reach, -reach}) {
        const AdmissibleCurve moved = translate_curve(cc.curve, theta);
        double psi = 0, prev = 0;
        for (int i = 0; i < moved.nodes(); ++i) {
            const Vec3 p = moved.point(i);
            const double lat = std::asin(std::clamp(p.dot(cb.frame.e3), -1.0, 1.0));
            const double a = std::atan2(p.dot(cb.frame.e2), p.dot(cb.frame.e1));
            if (i == 0) psi = a;
            else psi += std::remainder(a - prev, 2 * kPi);
            prev = a;
            EXPECT_LE(lat, boundary_at(cb.band, cb.band.theta_plus, psi) + 1e-3) << theta << " " << i;
            EXPECT_GE(lat, boundary_at(cb.band, cb.band.theta_minus, psi) - 1e-3) << theta << " " << i;
        }
    }
}

TEST(Collapse, CondensedCurvesCollapseToCirclesThroughValidPaths) {
    const CurvatureBounds& b = neg_bounds();
    const double expected_rho = kPi / 2 - (kPi - b.rho0()) / 2;
    for (const AdmissibleCurve& c :
         {make_circle(1.0, 2, b, 512), corpus_data::wobbly_circle(1.0, 1, 0.1, 2, b, 512)}) {
        const HomotopyPath p = collapse_condensed(c, 4, kNodes);
        EXPECT_EQ(p.curves.size(), 9u);
        const ValidationReport r = validate_path(p, b);
        EXPECT_TRUE(r.pass);
        for (int x : r.parity) EXPECT_EQ(x, lift_parity(c));
        const RadiusRange rr = radius_range(p.curves.back());
        EXPECT_NEAR(rr.min, expected_rho, 1e-3);
        EXPECT_NEAR(rr.max, expected_rho, 1e-3);
        const int nu = classify_component(c).nu.value();
        EXPECT_EQ(classify_component(p.curves.back()).nu.value(), nu);
    }
}
