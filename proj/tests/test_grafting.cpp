#include "corpus.hpp"

#include <gtest/gtest.h>

using namespace spherecurve;

namespace {

GraftingFunction single(double T, double x, double d, bool plus) {
    GraftingFunction f = GraftingFunction::identity(T);
    (plus ? f.x_plus : f.x_minus).push_back(x);
    (plus ? f.d_plus : f.d_minus).push_back(d);
    f.s1 = T + d;
    return f;
}

// Diffuse circle in a space with kappa1 = -inf.
AdmissibleCurve diffuse_circle() { return make_circle(kPi / 3, 1, CurvatureBounds::make(-kInf, kInf), 512); }

const AdmissibleCurve& neither() {
    static const AdmissibleCurve c = neither_example(0.4, 0.2, 32);
    return c;
}

}  // namespace

TEST(GraftingFunction, IdentityEvaluatesToT) {
    const GraftingFunction id = GraftingFunction::identity(3.0);
    EXPECT_TRUE(id.valid());
    for (double t : {0.0, 0.7, 3.0}) EXPECT_EQ(id(t), t);
}

TEST(GraftingFunction, JumpConventionsAndUnitSlopeLowerBound) {
    GraftingFunction f = GraftingFunction::identity(2.0);
    f.x_plus = {0.5};
    f.d_plus = {0.3};
    f.x_minus = {1.2};
    f.d_minus = {0.4};
    f.s1 = 2.7;
    ASSERT_TRUE(f.valid());
    EXPECT_DOUBLE_EQ(f(0.5), 0.5);  // X+ jumps after the point
    EXPECT_DOUBLE_EQ(f.right_limit(0.5), 0.8);
    EXPECT_DOUBLE_EQ(f(1.2), 1.9);  // X- jumps at the point
    EXPECT_DOUBLE_EQ(f.left_limit(1.2), 1.5);
    EXPECT_DOUBLE_EQ(f(2.0), 2.7);
    for (double t = 0; t < 1.9; t += 0.05)
        for (double h : {0.01, 0.1, 0.5}) EXPECT_GE(f(t + h) - f(t), h - 1e-12);
}

TEST(GraftingFunction, InvalidWhenWeightsDoNotSum) {
    GraftingFunction f = single(1.0, 0.5, 0.2, true);
    f.s1 = 1.3;
    EXPECT_FALSE(f.valid());
    f = single(1.0, 0.5, -0.2, false);
    EXPECT_FALSE(f.valid());
}

TEST(Compose, IdentityIsNeutral) {
    const GraftingFunction phi = single(2.0, 0.6, 0.5, false);
    const GraftingFunction a = compose_grafting(GraftingFunction::identity(2.0), phi);
    const GraftingFunction b = compose_grafting(phi, GraftingFunction::identity(2.5));
    for (double t = 0; t <= 2.0; t += 0.01) {
        EXPECT_NEAR(a(t), phi(t), 1e-12);
        EXPECT_NEAR(b(t), phi(t), 1e-12);
    }
}

TEST(Compose, DisjointInsertionsAddUp) {
    const GraftingFunction a = single(2.0, 0.5, 0.3, false);
    const GraftingFunction b = single(2.3, 1.6, 0.2, true);
    const GraftingFunction c = compose_grafting(a, b);
    EXPECT_TRUE(c.valid());
    EXPECT_NEAR(c.s1, 2.0 + 0.3 + 0.2, 1e-12);
    EXPECT_EQ(c.x_plus.size() + c.x_minus.size(), 2u);
    for (double t = 0; t <= 2.0; t += 0.01) EXPECT_NEAR(c(t), b(a(t)), 1e-12) << t;
    // Insertion sets grow and weights do not shrink.
    EXPECT_NE(std::find(c.x_minus.begin(), c.x_minus.end(), 0.5), c.x_minus.end());
}

TEST(Compose, InsertionAtAnExistingPointAccumulates) {
    const GraftingFunction a = single(2.0, 0.5, 0.3, false);
    const GraftingFunction b = single(2.3, 0.7, 0.2, false);  // inside the arc inserted by a
    const GraftingFunction c = compose_grafting(a, b);
    EXPECT_TRUE(c.valid());
    for (double t = 0; t <= 2.0; t += 0.01) EXPECT_NEAR(c(t), b(a(t)), 1e-12) << t;
    double w = 0;
    for (size_t i = 0; i < c.x_minus.size(); ++i)
        if (c.x_minus[i] == 0.5) w = c.d_minus[i];
    EXPECT_GE(w, 0.3);
}

TEST(Compose, EqualLengthsForceIdentity) {
    const GraftingFunction id = GraftingFunction::identity(1.5);
    const GraftingFunction c = compose_grafting(id, id);
    EXPECT_TRUE(c.x_plus.empty());
    EXPECT_TRUE(c.x_minus.empty());
    EXPECT_EQ(c.s1, 1.5);
}

TEST(Compose, DomainMismatchThrows) {
    try {
        compose_grafting(single(1.0, 0.5, 0.2, true), GraftingFunction::identity(1.0));
        FAIL() << "expected DomainMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainMismatch);
    }
}

TEST(Antipodal, TotalCurvatureFrameAndPullback) {
    const AdmissibleCurve c = diffuse_circle();
    const AdmissibleCurve g = reparametrize_by_curvature(c);
    for (double s : {0.3, 0.7, 1.5}) {
        const GraftResult r = graft_antipodal_circles(c, s);
        EXPECT_NEAR(total_curvature(r.curve) - total_curvature(c), 2 * s, 1e-6);
        EXPECT_LT(r.record.frame_residual, 1e-7);
        const Quat a = g.z.back(), b = r.curve.z.back();
        EXPECT_LT(std::sqrt(std::pow(a.w - b.w, 2) + std::pow(a.x - b.x, 2) + std::pow(a.y - b.y, 2) +
                            std::pow(a.z - b.z, 2)),
                  1e-7);
        EXPECT_TRUE(r.record.phi.valid());
        EXPECT_NEAR(r.record.phi.s1, r.curve.domain(), 1e-9);
        EXPECT_LE(pullback_defect(g, r.curve, r.record.phi), 1e-8);
        ASSERT_EQ(r.record.arcs.size(), 2u);
        // The two inserted caustic points are antipodal.
        const Vec3 x1 = std::cos(r.record.arcs[0].rho) * g.frame_at(r.record.arcs[0].t).col(0) +
                        std::sin(r.record.arcs[0].rho) * g.frame_at(r.record.arcs[0].t).col(2);
        const Vec3 x2 = std::cos(r.record.arcs[1].rho) * g.frame_at(r.record.arcs[1].t).col(0) +
                        std::sin(r.record.arcs[1].rho) * g.frame_at(r.record.arcs[1].t).col(2);
        EXPECT_LT((x1 + x2).norm(), 1e-3);
    }
}

TEST(Antipodal, ZeroTurnIsIdentity) {
    const AdmissibleCurve c = diffuse_circle();
    const GraftResult r = graft_antipodal_circles(c, 0.0);
    const AdmissibleCurve g = reparametrize_by_curvature(c);
    EXPECT_NEAR(r.curve.domain(), g.domain(), 1e-12);
    for (double u = 0; u < g.domain(); u += 0.1) EXPECT_LT((r.curve.frame_at(u).col(0) - g.frame_at(u).col(0)).norm(), 1e-9);
}

TEST(Antipodal, FullTurnsInsertClosedLoops) {
    const AdmissibleCurve c = diffuse_circle();
    const GraftResult r = graft_antipodal_circles(c, 2 * kPi);
    for (const InsertedArc& a : r.record.arcs) {
        const double lo = r.record.phi.left_limit(a.t), hi = r.record.phi.right_limit(a.t);
        EXPECT_NEAR(hi - lo, 2 * kPi, 1e-9);
        EXPECT_LT((r.curve.frame_at(lo).col(0) - r.curve.frame_at(hi).col(0)).norm(), 1e-9);
    }
}

TEST(Antipodal, NotDiffuseThrows) {
    const AdmissibleCurve c = make_circle(1.2, 1, CurvatureBounds::make(-1, kInf), 256);
    try {
        graft_antipodal_circles(c, 0.5);
        FAIL() << "expected NotDiffuse";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotDiffuse);
    }
}

TEST(Simplex, TotalCurvatureFrameAndWeights) {
    const AdmissibleCurve& c = neither();
    const AdmissibleCurve g = reparametrize_by_curvature(c);
    const double s = 1e-4;
    const GraftResult r = graft_simplex_step(c, s);
    EXPECT_NEAR(total_curvature(r.curve) - total_curvature(c), s, 1e-6);
    EXPECT_LT(r.record.frame_residual, 1e-7);
    EXPECT_TRUE(r.record.phi.valid());
    EXPECT_LE(pullback_defect(g, r.curve, r.record.phi), 1e-8);
    ASSERT_EQ(r.record.arcs.size(), 4u);
    ASSERT_EQ(r.record.weights.size(), 4u);
    double sum = 0;
    for (size_t i = 0; i < 4; ++i) {
        sum += r.record.arcs[i].sigma;
        EXPECT_NEAR(r.record.arcs[i].sigma / s, r.record.weights[i], 0.1 * r.record.weights[i]) << i;
    }
    EXPECT_NEAR(sum, s, 1e-12);
}

TEST(Simplex, ZeroStepIsIdentity) {
    const GraftResult r = graft_simplex_step(neither(), 0.0);
    for (const InsertedArc& a : r.record.arcs) EXPECT_EQ(a.sigma, 0);
    EXPECT_NEAR(total_curvature(r.curve), total_curvature(neither()), 1e-9);
}

TEST(Simplex, NotNonCondensedThrows) {
    const AdmissibleCurve c = make_circle(0.5, 1, CurvatureBounds::make(0, kInf), 256);
    try {
        graft_simplex_step(c, 0.01);
        FAIL() << "expected NotNonCondensed";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotNonCondensed);
    }
}

TEST(Chain, CondensedAndDiffuseInputsReturnImmediately) {
    const GraftChain a = graft_until_resolved(make_circle(0.5, 2, CurvatureBounds::make(0, kInf), 256), 0.5, 10);
    EXPECT_EQ(a.status, StatusTag::Condensed);
    EXPECT_TRUE(a.records.empty());
    EXPECT_EQ(a.accumulated, 0);
    const GraftChain b = graft_until_resolved(diffuse_circle(), 0.5, 10);
    EXPECT_EQ(b.status, StatusTag::Diffuse);
    EXPECT_TRUE(b.records.empty());
}

TEST(Chain, NeitherExampleResolvesBelowTheBound) {
    const AdmissibleCurve& c = neither();
    ASSERT_EQ(condensed_status(reduce_to_k0(c).curve).tag, StatusTag::Neither);
    const int nu = rotation_number_nondiffuse(reduce_to_k0(c).curve);
    const GraftChain ch = graft_until_resolved(c, 0.5, 50);
    EXPECT_NE(ch.status, StatusTag::Neither);
    EXPECT_FALSE(ch.budget_exhausted);
    EXPECT_FALSE(ch.bound_violated);
    EXPECT_NEAR(ch.bound / total_curvature_bound(c.bounds.rho0(), nu), 1, 1e-8);
    EXPECT_LT(ch.tot.back(), ch.bound);
    EXPECT_NEAR(ch.tot.back() - ch.tot.front(), ch.accumulated, 1e-6);
    for (size_t i = 1; i < ch.tot.size(); ++i) EXPECT_GT(ch.tot[i], ch.tot[i - 1]);
    for (const GraftRecord& rec : ch.records) EXPECT_LT(rec.frame_residual, 1e-7);
    EXPECT_EQ(lift_parity(ch.curve), lift_parity(c));
}

TEST(Chain, BudgetExceededThrows) {
    try {
        graft_until_resolved(neither(), 0.5, 0.6);
        FAIL() << "expected BudgetExceeded";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
    }
    const GraftChain ch = graft_chain(neither(), 0.5, 0.6);
    EXPECT_TRUE(ch.budget_exhausted);
    EXPECT_EQ(ch.status, StatusTag::Neither);
}
