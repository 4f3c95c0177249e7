#include "spherecurve/sphere.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spherecurve;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return Vec3(g(rng), g(rng), g(rng)).normalized();
}

Quat random_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Quat q(g(rng), g(rng), g(rng), g(rng));
    const double n = q.norm();
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

// Rotation by angle th about the unit axis a.
Mat3 rodrigues(const Vec3& a, double th) {
    const Mat3 K = (Mat3() << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0).finished();
    return Mat3::Identity() + std::sin(th) * K + (1 - std::cos(th)) * K * K;
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Quaternion, IdentityAndKernel) {
    EXPECT_LT(max_abs(quat_to_rotation(Quat()) - Mat3::Identity()), 1e-15);
    EXPECT_LT(max_abs(quat_to_rotation(Quat(-1, 0, 0, 0)) - Mat3::Identity()), 1e-15);
}

TEST(Quaternion, HalfAngleExponentialMatchesRodrigues) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = random_unit(rng);
        const double th = angle(rng);
        EXPECT_LT(max_abs(quat_to_rotation(quat_exp(0.5 * th * a)) - rodrigues(a, th)), 1e-12);
    }
    const Mat3 Rz = quat_to_rotation(quat_exp(Vec3(0, 0, kPi / 4)));
    EXPECT_LT(max_abs(Rz - rodrigues(Vec3::UnitZ(), kPi / 2)), 1e-15);
}

TEST(Quaternion, ExponentialClosedForms) {
    const Quat one = quat_exp(Vec3::Zero());
    EXPECT_EQ(one.w, 1.0);
    const Quat i = quat_exp(Vec3(kPi / 2, 0, 0));
    EXPECT_NEAR(i.w, 0, 1e-16);
    EXPECT_NEAR(i.x, 1, 1e-16);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 100; ++k) {
        const Vec3 v(u(rng), u(rng), u(rng));
        const Quat p = quat_exp(v) * quat_exp(-v);
        EXPECT_NEAR(p.w, 1, 1e-12);
        EXPECT_LT(p.vec().norm(), 1e-12);
        EXPECT_NEAR(quat_exp(v).norm(), 1, 1e-15);
    }
}

TEST(Quaternion, CoveringMapIsHomomorphism) {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 100; ++k) {
        const Quat a = random_quat(rng), b = random_quat(rng);
        EXPECT_LT(max_abs(quat_to_rotation(a * b) - quat_to_rotation(a) * quat_to_rotation(b)), 1e-10);
        EXPECT_EQ(quat_to_rotation(a), quat_to_rotation(-a));
        const Mat3 R = quat_to_rotation(a);
        EXPECT_LT(max_abs(R.transpose() * R - Mat3::Identity()), 1e-10);
        EXPECT_NEAR(R.determinant(), 1, 1e-10);
        const Quat back = rotation_to_quat(R);
        EXPECT_NEAR(std::abs(back.dot(a)), 1, 1e-12);
    }
}

TEST(Quaternion, CoverMetricScalesByEight) {
    // |d/dt pi(z(t))|_F = 2 sqrt(2) |z'(t)| along z(t) = z0 exp(t w / 2).
    std::mt19937_64 rng(10);
    for (int k = 0; k < 20; ++k) {
        const Quat z0 = random_quat(rng);
        const Vec3 w = 1.7 * random_unit(rng);
        const double t = 0.3, dt = 1e-6;
        auto z = [&](double s) { return z0 * quat_exp(0.5 * s * w); };
        const Mat3 dR = (quat_to_rotation(z(t + dt)) - quat_to_rotation(z(t - dt))) / (2 * dt);
        const Quat a = z(t + dt), b = z(t - dt);
        const double dz = std::sqrt(std::pow(a.w - b.w, 2) + std::pow(a.x - b.x, 2) + std::pow(a.y - b.y, 2) +
                                    std::pow(a.z - b.z, 2)) /
                          (2 * dt);
        EXPECT_NEAR(dR.norm(), 2 * std::sqrt(2.0) * dz, 1e-6);
    }
}

TEST(Stereographic, AntipodeMapsToOrigin) {
    const Vec3 pole = Vec3(0.3, -0.2, 0.9).normalized();
    EXPECT_LT(stereographic(-pole, pole).norm(), 1e-15);
}

TEST(Stereographic, EquatorMapsToUnitCircle) {
    const Vec3 pole = Vec3(1, 2, 2).normalized();
    const PlaneFrame f = projection_frame(pole);
    for (int k = 0; k < 12; ++k) {
        const double a = 2 * kPi * k / 12;
        const Vec3 p = std::cos(a) * f.v1 + std::sin(a) * f.v2;
        EXPECT_NEAR(stereographic(p, pole).norm(), 1, 1e-14);
    }
    EXPECT_LT((f.v1.cross(f.v2) - pole).norm(), 1e-14);
}

TEST(Stereographic, RoundTrip) {
    std::mt19937_64 rng(11);
    const Vec3 pole = random_unit(rng);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 p = random_unit(rng);
        if (angle_between(p, pole) < 1e-3) continue;
        EXPECT_LT((unstereographic(stereographic(p, pole), pole) - p).norm(), 1e-10);
    }
}

TEST(Stereographic, DegenerateAtPole) {
    const Vec3 pole = Vec3::UnitZ();
    try {
        stereographic(Vec3(1e-9, 0, 1).normalized(), pole);
        FAIL() << "expected DegenerateProjection";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateProjection);
    }
}

TEST(Mobius, IdentityAtUnitRatioAndFixedAxis) {
    std::mt19937_64 rng(12);
    const Vec3 pole = random_unit(rng);
    for (int k = 0; k < 50; ++k) {
        const Vec3 p = random_unit(rng);
        if (angle_between(p, pole) < 1e-3) continue;
        EXPECT_LT((mobius_dilate(p, 1.0, pole) - p).norm(), 1e-12);
    }
    for (double r : {0.1, 0.5, 0.9}) EXPECT_LT((mobius_dilate(-pole, r, pole) + pole).norm(), 1e-14);
}

TEST(Mobius, CirclesStayCircles) {
    const Vec3 pole = Vec3(0.1, 0.3, -1).normalized();
    const Vec3 c = Vec3(0.4, -0.2, 0.7).normalized();
    const Vec3 e1 = c.unitOrthogonal(), e2 = c.cross(e1);
    std::vector<Vec3> img;
    for (int k = 0; k < 64; ++k) {
        const double a = 2 * kPi * k / 64;
        const Vec3 p = std::cos(0.6) * c + std::sin(0.6) * (std::cos(a) * e1 + std::sin(a) * e2);
        img.push_back(mobius_dilate(p, 0.37, pole));
    }
    // A set of points on the sphere is a circle iff it lies in a plane.
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : img) mean += p / img.size();
    Mat3 C = Mat3::Zero();
    for (const Vec3& p : img) C += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> es(C);
    const Vec3 normal = es.eigenvectors().col(0);
    double dev = 0;
    for (const Vec3& p : img) dev = std::max(dev, std::abs((p - mean).dot(normal)));
    EXPECT_LT(dev, 1e-8);
}

TEST(Hemisphere, SmallClusterIsInOpenHemisphere) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-0.07, 0.07);
    std::vector<Vec3> pts;
    for (int k = 0; k < 200; ++k) pts.push_back(Vec3(u(rng), u(rng), 1).normalized());
    auto h = hemisphere_feasible(pts, false);
    ASSERT_TRUE(h.has_value());
    for (const Vec3& p : pts) EXPECT_GT(p.dot(*h), 0);
}

TEST(Hemisphere, ThirdRootsOfUnityAreNotInOpenHemisphere) {
    std::vector<Vec3> pts;
    for (int k = 0; k < 3; ++k) pts.emplace_back(std::cos(2 * kPi * k / 3), std::sin(2 * kPi * k / 3), 0.0);
    EXPECT_FALSE(hemisphere_feasible(pts, false).has_value());
    EXPECT_TRUE(hemisphere_feasible(pts, true).has_value());
}

TEST(Hemisphere, AntipodalPair) {
    const Vec3 p = Vec3(1, -2, 0.5).normalized();
    EXPECT_FALSE(hemisphere_feasible({p, -p}, false).has_value());
    auto h = hemisphere_feasible({p, -p}, true);
    ASSERT_TRUE(h.has_value());
    EXPECT_LT(std::abs(h->dot(p)), 1e-9);
}

TEST(Hull, Tetrahedron) {
    const std::vector<Vec3> tet = {Vec3(1, 1, 1).normalized(), Vec3(1, -1, -1).normalized(),
                                   Vec3(-1, 1, -1).normalized(), Vec3(-1, -1, 1).normalized()};
    EXPECT_TRUE(origin_in_hull_interior(tet));
}

TEST(Hull, OpenHemisphereSetIsNotEnclosing) {
    std::mt19937_64 rng(14);
    std::vector<Vec3> pts;
    while (pts.size() < 100) {
        const Vec3 p = random_unit(rng);
        if (p.z() > 0.05) pts.push_back(p);
    }
    EXPECT_FALSE(origin_in_hull_interior(pts));
}

TEST(Hull, EquatorWithPolesAgainstBruteForce) {
    std::vector<Vec3> pts = {Vec3::UnitZ(), -Vec3::UnitZ()};
    for (int k = 0; k < 24; ++k) pts.emplace_back(std::cos(2 * kPi * k / 24), std::sin(2 * kPi * k / 24), 0.0);
    EXPECT_TRUE(origin_in_hull_interior(pts));
    // Brute force: every lattice direction sees some point strictly behind it.
    double best = -kInf;
    for (const Vec3& h : fibonacci_lattice(20000)) {
        double m = kInf;
        for (const Vec3& p : pts) m = std::min(m, p.dot(h));
        best = std::max(best, m);
    }
    EXPECT_LT(best, 0);
}

TEST(Hull, OpenHemisphereImpliesNotEnclosing) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 60; ++trial) {
        const Vec3 axis = random_unit(rng);
        const double spread = 0.2 + 0.04 * trial;
        std::vector<Vec3> pts;
        for (int k = 0; k < 40; ++k) {
            Vec3 p = axis + spread * random_unit(rng);
            pts.push_back(p.normalized());
        }
        if (hemisphere_feasible(pts, false)) EXPECT_FALSE(origin_in_hull_interior(pts));
    }
}

TEST(Simplex, TargetIsAPoint) {
    std::mt19937_64 rng(16);
    std::vector<Vec3> pts;
    for (int k = 0; k < 20; ++k) pts.push_back(random_unit(rng));
    const SphericalSimplex s = containing_simplex(pts, pts[7]);
    ASSERT_EQ(s.vertices.size(), 1u);
    EXPECT_NEAR(s.weights[0], 1, 1e-12);
    EXPECT_EQ(s.indices[0], 7);
}

TEST(Simplex, TetrahedronHasEqualWeights) {
    const std::vector<Vec3> tet = {Vec3(1, 1, 1).normalized(), Vec3(1, -1, -1).normalized(),
                                   Vec3(-1, 1, -1).normalized(), Vec3(-1, -1, 1).normalized()};
    const SphericalSimplex s = containing_simplex(tet, Vec3::Zero());
    ASSERT_EQ(s.vertices.size(), 4u);
    for (double w : s.weights) EXPECT_NEAR(w, 0.25, 1e-12);
}

TEST(Simplex, RandomCloudReproducesOrigin) {
    std::mt19937_64 rng(17);
    std::vector<Vec3> pts;
    for (int k = 0; k < 200; ++k) pts.push_back(random_unit(rng));
    ASSERT_TRUE(origin_in_hull_interior(pts));
    const SphericalSimplex s = containing_simplex(pts, Vec3::Zero());
    ASSERT_LE(s.vertices.size(), 4u);
    Vec3 sum = Vec3::Zero();
    double total = 0;
    for (size_t i = 0; i < s.vertices.size(); ++i) {
        EXPECT_GT(s.weights[i], 0);
        EXPECT_EQ(s.vertices[i], pts[s.indices[i]]);
        sum += s.weights[i] * s.vertices[i];
        total += s.weights[i];
    }
    EXPECT_LT(sum.norm(), 1e-9);
    EXPECT_NEAR(total, 1, 1e-10);
}

TEST(Simplex, OutsideHullThrows) {
    std::vector<Vec3> pts = {Vec3::UnitX(), Vec3::UnitY(), Vec3(1, 1, 1).normalized()};
    try {
        containing_simplex(pts, Vec3::Zero());
        FAIL() << "expected NotInHull";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotInHull);
    }
}
