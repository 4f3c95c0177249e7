#include "spherecurve/sphere.hpp"

#include "lp.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace spherecurve {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateProjection: return "DegenerateProjection";
        case ErrorCode::NotInHull: return "NotInHull";
        case ErrorCode::RadiusOutOfBounds: return "RadiusOutOfBounds";
        case ErrorCode::AmbiguousParity: return "AmbiguousParity";
        case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
        case ErrorCode::EmptyDual: return "EmptyDual";
        case ErrorCode::NearZeroCentroid: return "NearZeroCentroid";
        case ErrorCode::WindingResidual: return "WindingResidual";
        case ErrorCode::NoGapFound: return "NoGapFound";
        case ErrorCode::CurvatureBoundTooTight: return "CurvatureBoundTooTight";
        case ErrorCode::ParameterOverlap: return "ParameterOverlap";
        case ErrorCode::NotCondensed: return "NotCondensed";
        case ErrorCode::StageToleranceFailure: return "StageToleranceFailure";
        case ErrorCode::NonpositiveRotation: return "NonpositiveRotation";
        case ErrorCode::DomainMismatch: return "DomainMismatch";
        case ErrorCode::NotDiffuse: return "NotDiffuse";
        case ErrorCode::AntipodalDefect: return "AntipodalDefect";
        case ErrorCode::NotNonCondensed: return "NotNonCondensed";
        case ErrorCode::ContinuationDiverged: return "ContinuationDiverged";
        case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::BoundViolation: return "BoundViolation";
        case ErrorCode::MeridianMiss: return "MeridianMiss";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::TrackCrossing: return "TrackCrossing";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NotClosed: return "NotClosed";
        case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

Quat quat_exp(const Vec3& v) {
    const double a = v.norm();
    if (a < 1e-14) return {};
    const double s = std::sin(a) / a;
    return {std::cos(a), s * v.x(), s * v.y(), s * v.z()};
}

Mat3 quat_to_rotation(Quat q) {
    const double n = q.norm();
    if (std::abs(n - 1.0) > 1e-9) q = {q.w / n, q.x / n, q.y / n, q.z / n};
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 R;
    R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return R;
}

Quat rotation_to_quat(const Mat3& R) {
    const double tr = R.trace();
    Quat q;
    if (tr > 0) {
        double s = 2 * std::sqrt(tr + 1.0);
        q = {0.25 * s, (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s, (R(1, 0) - R(0, 1)) / s};
    } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
        double s = 2 * std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2));
        q = {(R(2, 1) - R(1, 2)) / s, 0.25 * s, (R(0, 1) + R(1, 0)) / s, (R(0, 2) + R(2, 0)) / s};
    } else if (R(1, 1) > R(2, 2)) {
        double s = 2 * std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2));
        q = {(R(0, 2) - R(2, 0)) / s, (R(0, 1) + R(1, 0)) / s, 0.25 * s, (R(1, 2) + R(2, 1)) / s};
    } else {
        double s = 2 * std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1));
        q = {(R(1, 0) - R(0, 1)) / s, (R(0, 2) + R(2, 0)) / s, (R(1, 2) + R(2, 1)) / s, 0.25 * s};
    }
    const double n = q.norm();
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

Vec3 quat_rotate(const Quat& q, const Vec3& v) {
    return (q * Quat::pure(v) * q.conj()).vec();
}

Mat3 skew(const Vec3& w) {
    Mat3 S;
    S << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    return S;
}

PlaneFrame projection_frame(const Vec3& pole) {
    PlaneFrame f;
    f.pole = pole.normalized();
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(f.pole[i]) < std::abs(f.pole[k])) k = i;
    Vec3 e = Vec3::Unit(k);
    f.v1 = (e - e.dot(f.pole) * f.pole).normalized();
    f.v2 = f.pole.cross(f.v1);
    return f;
}

Vec2 stereographic(const Vec3& p, const Vec3& pole) {
    if (angle_between(p, pole) < 1e-8)
        throw Error(ErrorCode::DegenerateProjection, "point coincides with the projection center");
    PlaneFrame f = projection_frame(pole);
    const double a = p.dot(f.pole);
    Vec3 x = (p - a * f.pole) / (1.0 - a);
    return {x.dot(f.v1), x.dot(f.v2)};
}

Vec3 unstereographic(const Vec2& x, const Vec3& pole) {
    PlaneFrame f = projection_frame(pole);
    Vec3 X = x.x() * f.v1 + x.y() * f.v2;
    const double s = x.squaredNorm();
    return ((2.0 * X + (s - 1.0) * f.pole) / (s + 1.0)).normalized();
}

Vec2 stereographic_differential(const Vec3& p, const Vec3& dp, const Vec3& pole) {
    if (angle_between(p, pole) < 1e-8)
        throw Error(ErrorCode::DegenerateProjection, "point coincides with the projection center");
    PlaneFrame f = projection_frame(pole);
    const double a = p.dot(f.pole);
    const double da = dp.dot(f.pole);
    Vec3 d = (dp - da * f.pole) / (1.0 - a) + (p - a * f.pole) * da / ((1.0 - a) * (1.0 - a));
    return {d.dot(f.v1), d.dot(f.v2)};
}

Vec3 mobius_dilate(const Vec3& p, double r, const Vec3& pole) {
    if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorCode::DomainError, "dilation factor must lie in (0,1]");
    Vec2 x = stereographic(p, pole);
    if (r == 1.0) return p;
    return unstereographic(r * x, pole);
}

std::vector<Vec3> fibonacci_lattice(int n) {
    std::vector<Vec3> out;
    out.reserve(n);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - (2.0 * i + 1.0) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden * i;
        out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return out;
}

namespace {

double min_dot(const std::vector<Vec3>& points, const Vec3& h, double stop_below) {
    double m = kInf;
    for (const auto& p : points) {
        m = std::min(m, p.dot(h));
        if (m < stop_below) break;
    }
    return m;
}

// Best unit h for max min <p,h>: lattice scan then a shrinking pattern search.
std::pair<Vec3, double> best_direction(const std::vector<Vec3>& points, int lattice) {
    Vec3 best_h = Vec3::UnitZ();
    double best = -kInf;
    for (const auto& u : fibonacci_lattice(lattice)) {
        double m = min_dot(points, u, best);
        if (m > best) {
            best = m;
            best_h = u;
        }
    }
    double step = 2.0 * std::sqrt(4.0 * kPi / lattice);
    while (step > 1e-9) {
        PlaneFrame f = projection_frame(best_h);
        bool improved = false;
        for (int k = 0; k < 8; ++k) {
            double a = 2.0 * kPi * k / 8.0;
            Vec3 cand = (best_h + step * (std::cos(a) * f.v1 + std::sin(a) * f.v2)).normalized();
            double m = min_dot(points, cand, best);
            if (m > best) {
                best = m;
                best_h = cand;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return {best_h, best};
}

// maximize c.x subject to row(p) x <= rhs for every point (row(p) = (-p, 1) with a
// margin variable, -p without), |x_k| <= 1 for the first three coordinates and the
// `extra` rows. Constraint generation from a strided subset: the subset optimum is
// returned once it violates no point.
detail::LpResult point_lp(const std::vector<Vec3>& points, bool with_margin, double rhs, const detail::RowMatrix& extra,
                          const Eigen::VectorXd& extra_b, const Eigen::VectorXd& c, const Eigen::VectorXd& x0) {
    const int M = static_cast<int>(points.size());
    const int d = with_margin ? 4 : 3;
    auto violation = [&](int i, const Eigen::VectorXd& x) {
        double a = -points[i].dot(x.head<3>()) + (with_margin ? x[3] : 0.0);
        return a - rhs;
    };
    std::vector<char> used(M, 0);
    std::vector<int> active;
    const int stride = std::max(1, M / 512);
    for (int i = 0; i < M; i += stride) {
        used[i] = 1;
        active.push_back(i);
    }
    detail::LpResult lp;
    for (int round = 0;; ++round) {
        const int K = static_cast<int>(active.size()), E = static_cast<int>(extra.rows());
        detail::RowMatrix A = detail::RowMatrix::Zero(K + 6 + E, d);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(K + 6 + E);
        for (int r = 0; r < K; ++r) {
            const Vec3& p = points[active[r]];
            A.row(r).head<3>() = -p.transpose();
            if (with_margin) A(r, 3) = 1.0;
            b[r] = rhs;
        }
        for (int k = 0; k < 3; ++k) {
            A(K + 2 * k, k) = 1.0;
            A(K + 2 * k + 1, k) = -1.0;
            b[K + 2 * k] = b[K + 2 * k + 1] = 1.0;
        }
        for (int r = 0; r < E; ++r) {
            A.row(K + 6 + r) = extra.row(r).head(d);
            b[K + 6 + r] = extra_b[r];
        }
        lp = detail::lp_maximize(A, b, c, x0);
        if (!lp.bounded) return lp;
        std::vector<std::pair<double, int>> viol;
        for (int i = 0; i < M; ++i)
            if (!used[i]) {
                double v = violation(i, lp.x);
                if (v > 1e-13) viol.emplace_back(-v, i);
            }
        if (viol.empty() || active.size() == static_cast<size_t>(M)) return lp;
        const size_t add = std::min<size_t>(viol.size(), round < 8 ? 256 : viol.size());
        std::partial_sort(viol.begin(), viol.begin() + add, viol.end());
        for (size_t k = 0; k < add; ++k) {
            used[viol[k].second] = 1;
            active.push_back(viol[k].second);
        }
    }
}

}  // namespace

HemisphereInfo hemisphere_info(const std::vector<Vec3>& points, const ToleranceProfile& tol) {
    HemisphereInfo info;
    if (points.empty()) throw Error(ErrorCode::DomainError, "empty point set");
    const double eps = tol.feasibility;

    const detail::RowMatrix none(0, 4);
    const Eigen::VectorXd none_b(0);
    Eigen::Vector4d c(0, 0, 0, 1), x0(0, 0, 0, -1);
    auto lp = point_lp(points, true, 0.0, none, none_b, c, x0);
    const double m_box = lp.value;

    if (m_box > eps) {
        // Kelley cutting planes on the unit ball: value is an upper bound, the
        // normalized iterate gives a lower bound.
        info.open = info.closed = true;
        std::vector<Vec3> cuts;
        Vec3 h = lp.x.head<3>().normalized();
        double lower = min_dot(points, h, -kInf);
        double upper = m_box;
        for (int it = 0; it < 80 && upper - lower > 1e-11; ++it) {
            cuts.push_back(lp.x.head<3>().normalized());
            detail::RowMatrix Ac(cuts.size(), 4);
            for (size_t k = 0; k < cuts.size(); ++k) Ac.row(k) << cuts[k].x(), cuts[k].y(), cuts[k].z(), 0.0;
            lp = point_lp(points, true, 0.0, Ac, Eigen::VectorXd::Ones(cuts.size()), c, x0);
            upper = std::min(upper, lp.value);
            Vec3 cand = lp.x.head<3>().normalized();
            double m = min_dot(points, cand, -kInf);
            if (m > lower) {
                lower = m;
                h = cand;
            }
        }
        info.h = h;
        info.margin = lower;
        return info;
    }

    if (m_box >= -eps) {
        // Optimum is (numerically) zero and the LP point may be h = 0; look for a
        // large h with <p,h> >= -eps/2 along each signed axis.
        const detail::RowMatrix none3(0, 3);
        for (int k = 0; k < 6 && !info.closed; ++k) {
            Eigen::Vector3d obj = Eigen::Vector3d::Zero();
            obj[k / 2] = (k % 2 == 0) ? 1.0 : -1.0;
            auto r = point_lp(points, false, 0.5 * eps, none3, none_b, obj, Eigen::Vector3d::Zero());
            if (r.value >= 0.5) {
                info.closed = true;
                info.h = r.x.head<3>().normalized();
                info.margin = min_dot(points, info.h, -kInf);
            }
        }
        if (info.closed) return info;
    }

    auto [h, m] = best_direction(points, tol.lattice);
    info.h = h;
    info.margin = std::min(m, m_box);
    return info;
}

std::optional<Vec3> hemisphere_feasible(const std::vector<Vec3>& points, bool closed,
                                        const ToleranceProfile& tol) {
    HemisphereInfo info = hemisphere_info(points, tol);
    if (closed ? info.closed : info.open) return info.h;
    return std::nullopt;
}

bool origin_in_hull_interior(const std::vector<Vec3>& points, const ToleranceProfile& tol) {
    HemisphereInfo info = hemisphere_info(points, tol);
    return !info.closed && info.margin < -tol.feasibility;
}

namespace {

// Barycentric weights of `target` in the tetrahedron with vertices `v`; empty if degenerate.
std::optional<Eigen::Vector4d> tetra_weights(const std::array<Vec3, 4>& v, const Vec3& target) {
    const double vol = std::abs((v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0]))) / 6.0;
    if (vol < 1e-12) return std::nullopt;
    Eigen::Matrix4d A;
    for (int k = 0; k < 4; ++k) A.col(k) << v[k], 1.0;
    Eigen::Vector4d rhs(target.x(), target.y(), target.z(), 1.0);
    return Eigen::Vector4d(A.partialPivLu().solve(rhs));
}

SphericalSimplex make_simplex(const std::vector<Vec3>& points, const std::vector<int>& idx,
                              const std::vector<double>& w) {
    SphericalSimplex s;
    double total = 0;
    for (double x : w) total += x;
    for (size_t k = 0; k < idx.size(); ++k) {
        s.indices.push_back(idx[k]);
        s.vertices.push_back(points[idx[k]]);
        s.weights.push_back(w[k] / total);
    }
    return s;
}

}  // namespace

SphericalSimplex containing_simplex(const std::vector<Vec3>& points, const Vec3& target,
                                    const ToleranceProfile& tol) {
    const int M = static_cast<int>(points.size());
    if (M == 0) throw Error(ErrorCode::NotInHull, "empty point set");
    for (int i = 0; i < M; ++i)
        if ((points[i] - target).norm() < 1e-12) return make_simplex(points, {i}, {1.0});

    const double wmin = 1e-9;
    auto try_quad = [&](const std::array<int, 4>& q) -> std::optional<SphericalSimplex> {
        std::array<Vec3, 4> v = {points[q[0]], points[q[1]], points[q[2]], points[q[3]]};
        auto w = tetra_weights(v, target);
        if (!w || w->minCoeff() <= wmin) return std::nullopt;
        return make_simplex(points, {q[0], q[1], q[2], q[3]}, {(*w)[0], (*w)[1], (*w)[2], (*w)[3]});
    };

    auto bfs = detail::barycentric_bfs(points, target);
    const bool feasible = bfs.infeasibility < 1e-9 && !bfs.support.empty();
    if (feasible && bfs.support.size() == 4) {
        auto s = try_quad({bfs.support[0], bfs.support[1], bfs.support[2], bfs.support[3]});
        if (s) return *s;
    }

    std::mt19937_64 rng(tol.seed);
    std::normal_distribution<double> gauss;
    if (feasible) {
        // perturbed targets give generic vertices; keep the tetrahedron if it
        // also contains the true target
        for (int trial = 0; trial < 24; ++trial) {
            Vec3 u(gauss(rng), gauss(rng), gauss(rng));
            Vec3 shifted = target + 1e-3 * std::pow(0.5, trial % 8) * u.normalized();
            auto pb = detail::barycentric_bfs(points, shifted);
            if (pb.infeasibility < 1e-9 && pb.support.size() == 4) {
                auto s = try_quad({pb.support[0], pb.support[1], pb.support[2], pb.support[3]});
                if (s) return *s;
            }
        }
    }

    std::uniform_int_distribution<int> pick(0, M - 1);
    for (int trial = 0; trial < 20000; ++trial) {
        std::array<int, 4> q = {pick(rng), pick(rng), pick(rng), pick(rng)};
        if (q[0] == q[1] || q[0] == q[2] || q[0] == q[3] || q[1] == q[2] || q[1] == q[3] || q[2] == q[3])
            continue;
        auto s = try_quad(q);
        if (s) return *s;
    }

    const int stride = std::max(1, M / 48);
    std::vector<int> sub;
    for (int i = 0; i < M; i += stride) sub.push_back(i);
    const int S = static_cast<int>(sub.size());
    for (int a = 0; a < S; ++a)
        for (int b2 = a + 1; b2 < S; ++b2)
            for (int c = b2 + 1; c < S; ++c)
                for (int d = c + 1; d < S; ++d) {
                    auto s = try_quad({sub[a], sub[b2], sub[c], sub[d]});
                    if (s) return *s;
                }

    if (feasible) return make_simplex(points, bfs.support, bfs.weights);
    throw Error(ErrorCode::NotInHull, "no simplex with vertices in the set contains the target");
}

}  // namespace spherecurve
