#include "spherecurve/classify.hpp"

#include "spatial_hash.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace spherecurve {

namespace {

constexpr double kGridTurn = 0.02;
constexpr double kHullTurn = 0.01;
constexpr double kBarycenterTurn = 0.05;

double wrap_angle(double a) {
    return std::remainder(a, 2 * kPi);
}

std::vector<Vec3> three_fibers(const AdmissibleCurve& dense, double rho0) {
    std::vector<Vec3> out;
    out.reserve(3 * static_cast<size_t>(dense.nodes()));
    for (int i = 0; i < dense.nodes(); ++i) {
        Mat3 F = dense.frame(i);
        for (double th : {0.0, 0.5 * rho0, rho0}) out.push_back(std::cos(th) * F.col(0) + std::sin(th) * F.col(2));
    }
    return out;
}

double measured_spacing(const BandGrid& g) {
    double s = 0;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) {
            if (i + 1 < g.rows()) s = std::max(s, (g.at(i + 1, j) - g.at(i, j)).norm());
            if (j + 1 < g.cols()) s = std::max(s, (g.at(i, j + 1) - g.at(i, j)).norm());
        }
    return s;
}

struct BandEval {
    Vec3 p, ds, dth;
};

BandEval band_eval(const AdmissibleCurve& c, double s, double th) {
    const int seg = c.segment_at(s);
    Mat3 F = c.frame_at(s);
    const double cs = std::cos(th), sn = std::sin(th);
    BandEval e;
    e.p = cs * F.col(0) + sn * F.col(2);
    e.ds = c.v[seg] * (cs - c.kappa[seg] * sn) * F.col(1);
    e.dth = -sn * F.col(0) + cs * F.col(2);
    return e;
}

double wrap_param(const AdmissibleCurve& c, double s) {
    const double T = c.domain();
    if (c.closed) {
        s = std::fmod(s, T);
        if (s < 0) s += T;
        return s;
    }
    return std::clamp(s, 0.0, T);
}

// Gauss-Newton on C(s1,th1) + C(s2,th2) = 0 with minimum-norm steps.
AntipodalWitness refine_pair(const AdmissibleCurve& c, AntipodalWitness w, double lo, double hi) {
    auto residual = [&](const AntipodalWitness& a) {
        return (band_point_at(c, a.t1, a.theta1) + band_point_at(c, a.t2, a.theta2)).norm();
    };
    w.defect = residual(w);
    for (int it = 0; it < 60 && w.defect > 1e-15; ++it) {
        BandEval e1 = band_eval(c, w.t1, w.theta1), e2 = band_eval(c, w.t2, w.theta2);
        Vec3 r = e1.p + e2.p;
        Eigen::Matrix<double, 3, 4> J;
        J.col(0) = e1.ds;
        J.col(1) = e1.dth;
        J.col(2) = e2.ds;
        J.col(3) = e2.dth;
        Mat3 JJ = J * J.transpose() + 1e-14 * Mat3::Identity();
        Eigen::Vector4d d = -J.transpose() * JJ.ldlt().solve(r);
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, step *= 0.5) {
            AntipodalWitness n = w;
            n.t1 = wrap_param(c, w.t1 + step * d[0]);
            n.theta1 = std::clamp(w.theta1 + step * d[1], lo, hi);
            n.t2 = wrap_param(c, w.t2 + step * d[2]);
            n.theta2 = std::clamp(w.theta2 + step * d[3], lo, hi);
            n.defect = residual(n);
            if (n.defect < w.defect) {
                w = n;
                accepted = true;
                break;
            }
        }
        if (!accepted || step * d.norm() < 1e-16) break;
    }
    return w;
}

StatusTag make_tag(const CondensedStatus& s) {
    if (s.condensed && s.diffuse) return StatusTag::Both;
    if (s.borderline && !s.diffuse) return StatusTag::Borderline;
    if (s.condensed) return StatusTag::Condensed;
    if (s.diffuse) return StatusTag::Diffuse;
    return StatusTag::Neither;
}

int condensed_nu(const AdmissibleCurve& reduced, const CondensedStatus& st, const ToleranceProfile& tol,
                 Vec3* h_used) {
    if (!st.condensed) throw Error(ErrorCode::NotCondensed, "caustic band is not in a closed hemisphere");
    const double rho0 = reduced.bounds.rho0();
    Vec3 h = st.h;
    try {
        h = hemisphere_barycenter(three_fibers(densify(reduced, kBarycenterTurn), rho0), tol);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyDual && e.code() != ErrorCode::NearZeroCentroid) throw;
    }
    const double w = winding_about(reduced, h);
    const double r = std::round(w);
    if (std::abs(w - r) > tol.winding_residual)
        throw Error(ErrorCode::WindingResidual, "projected turning is not close to a multiple of 2 pi");
    if (h_used) *h_used = h;
    return static_cast<int>(r);
}

}  // namespace

int component_count(const CurvatureBounds& b) {
    const double q = kPi / b.rho0();
    const double r = std::round(q);
    const double f = std::abs(q - r) < 1e-12 ? r : std::floor(q);
    return static_cast<int>(f) + 1;
}

ReducedCurve reduce_to_k0(const AdmissibleCurve& c) {
    ReducedCurve out;
    out.curve = c.bounds.rho2 > 0 ? translate_curve(c, c.bounds.rho2) : c;
    out.kappa0 = out.curve.bounds.kappa1;
    return out;
}

const char* status_name(StatusTag tag) {
    switch (tag) {
        case StatusTag::Condensed: return "condensed";
        case StatusTag::Diffuse: return "diffuse";
        case StatusTag::Both: return "both";
        case StatusTag::Neither: return "neither";
        case StatusTag::Borderline: return "borderline";
    }
    return "unknown";
}

CausticCloud caustic_cloud(const AdmissibleCurve& reduced, const ToleranceProfile& tol) {
    CausticCloud cc;
    const double rho0 = reduced.bounds.rho0();
    cc.curve = densify(reduced, kGridTurn);
    const int M = std::clamp(static_cast<int>(std::ceil(rho0 / kGridTurn)) + 1, 9, std::max(9, tol.theta_nodes));
    cc.grid = band_grid(cc.curve, 0.0, rho0, M);
    cc.points = cc.grid.points;
    cc.spacing = measured_spacing(cc.grid);
    return cc;
}

CondensedStatus is_condensed(const AdmissibleCurve& reduced, const ToleranceProfile& tol) {
    CondensedStatus s;
    HemisphereInfo info = hemisphere_info(three_fibers(densify(reduced, kHullTurn), reduced.bounds.rho0()), tol);
    s.condensed = info.closed;
    s.margin = info.margin;
    s.h = info.h;
    s.borderline = std::abs(info.margin) < tol.borderline;
    s.tag = make_tag(s);
    return s;
}

AntipodalWitness find_antipodal_pair(const CausticCloud& cloud, double lo, double hi, const ToleranceProfile&) {
    const BandGrid& g = cloud.grid;
    std::vector<int> cols;
    for (int j = 0; j < g.cols(); ++j)
        if (g.theta[j] >= lo - 1e-15 && g.theta[j] <= hi + 1e-15) cols.push_back(j);
    AntipodalWitness best;
    if (cols.empty() || g.rows() == 0) return best;

    std::vector<Vec3> pts;
    std::vector<std::pair<int, int>> where;
    pts.reserve(static_cast<size_t>(g.rows()) * cols.size());
    for (int i = 0; i < g.rows(); ++i)
        for (int j : cols) {
            pts.push_back(g.at(i, j));
            where.emplace_back(i, j);
        }
    const double radius = 2.0 * cloud.spacing + 1e-12;
    detail::SpatialHash hash(pts, radius);

    std::vector<std::tuple<double, int, int>> cand;
    for (int a = 0; a < static_cast<int>(pts.size()); ++a) {
        double d;
        int b = hash.nearest(-pts[a], radius, d);
        if (b >= 0) cand.emplace_back(d, std::min(a, b), std::max(a, b));
    }
    std::sort(cand.begin(), cand.end());

    const int bucket = std::max(1, g.rows() / 64);
    std::vector<std::pair<int, int>> seen;
    int refined = 0;
    for (const auto& [d, a, b] : cand) {
        if (refined >= 24 || best.defect < 1e-12) break;
        std::pair<int, int> key{where[a].first / bucket, where[b].first / bucket};
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        ++refined;
        AntipodalWitness w;
        w.t1 = g.t[where[a].first];
        w.theta1 = g.theta[where[a].second];
        w.t2 = g.t[where[b].first];
        w.theta2 = g.theta[where[b].second];
        w = refine_pair(cloud.curve, w, lo, hi);
        if (w.defect < best.defect) best = w;
    }
    return best;
}

CondensedStatus is_diffuse(const AdmissibleCurve& reduced, const ToleranceProfile& tol) {
    CondensedStatus s;
    CausticCloud cloud = caustic_cloud(reduced, tol);
    s.antipodal = find_antipodal_pair(cloud, 0.0, reduced.bounds.rho0(), tol);
    s.diffuse = s.antipodal.defect < tol.antipodal;
    s.tag = make_tag(s);
    return s;
}

CondensedStatus condensed_status(const AdmissibleCurve& reduced, const ToleranceProfile& tol) {
    CondensedStatus s = is_condensed(reduced, tol);
    CondensedStatus d = is_diffuse(reduced, tol);
    s.diffuse = d.diffuse;
    s.antipodal = d.antipodal;
    s.tag = make_tag(s);
    return s;
}

Vec3 hemisphere_barycenter(const std::vector<Vec3>& cloud, const ToleranceProfile& tol) {
    auto feasible = [&](const Vec3& u) {
        for (const Vec3& p : cloud)
            if (p.dot(u) < 0) return false;
        return true;
    };
    const std::vector<Vec3> lattice = fibonacci_lattice(tol.lattice);
    Vec3 sum = Vec3::Zero();
    std::vector<Vec3> hits;
    for (const Vec3& u : lattice)
        if (feasible(u)) {
            hits.push_back(u);
            sum += u;
        }
    if (hits.empty()) throw Error(ErrorCode::EmptyDual, "no lattice direction lies in the dual set");
    if (sum.norm() / hits.size() < 1e-6) throw Error(ErrorCode::NearZeroCentroid, "dual set centroid vanishes");
    const Vec3 c = sum.normalized();

    // Exact radial extent of the dual set along rays from c: along
    // u(r) = cos(r) c + sin(r) w, <p,u> >= 0 fails first at atan2(<p,w>, <p,c>) + pi/2.
    // The area integral over each ray is closed-form; only the angle is sampled.
    const PlaneFrame pf = projection_frame(c);
    const int na = 1440;
    Vec3 acc = Vec3::Zero();
    for (int b = 0; b < na; ++b) {
        const double phi = 2 * kPi * (b + 0.5) / na;
        const Vec3 w = std::cos(phi) * pf.v1 + std::sin(phi) * pf.v2;
        double rmax = kPi;
        for (const Vec3& p : cloud)
            rmax = std::min(rmax, std::atan2(p.dot(w), std::max(0.0, p.dot(c))) + 0.5 * kPi);
        const double s = std::sin(rmax);
        acc += 0.5 * s * s * c + (0.5 * rmax - 0.25 * std::sin(2 * rmax)) * w;
    }
    if (acc.norm() < 1e-12) return c;
    return acc.normalized();
}

double winding_about(const AdmissibleCurve& c, const Vec3& h) {
    const AdmissibleCurve d = densify(c, kGridTurn);
    const Vec3 pole = -h.normalized();
    double total = 0;
    Vec2 prev = stereographic_differential(d.point(0), d.tangent(0), pole);
    for (int i = 1; i < d.nodes(); ++i) {
        Vec2 cur = stereographic_differential(d.point(i), d.tangent(i), pole);
        total += wrap_angle(std::atan2(cur.y(), cur.x()) - std::atan2(prev.y(), prev.x()));
        prev = cur;
    }
    return -total / (2 * kPi);
}

int rotation_number_condensed(const AdmissibleCurve& reduced, const ToleranceProfile& tol, Vec3* h_used) {
    return condensed_nu(reduced, is_condensed(reduced, tol), tol, h_used);
}

int rotation_number_nondiffuse(const AdmissibleCurve& reduced, const ToleranceProfile& tol) {
    const double rho0 = reduced.bounds.rho0();
    CausticCloud cloud = caustic_cloud(reduced, tol);
    const double delta = tol.member_factor * cloud.spacing;
    detail::SpatialHash hash(cloud.points, delta);
    const AdmissibleCurve& c = cloud.curve;
    const double step = std::min(cloud.spacing / 4, kPi / 2000);
    const int steps = static_cast<int>(std::ceil((kPi - rho0) / step));

    auto count_at = [&](double s0) -> std::optional<int> {
        const Mat3 F = c.frame_at(s0);
        auto fiber = [&](double th) -> Vec3 { return std::cos(th) * F.col(0) + std::sin(th) * F.col(2); };
        double th1 = kInf;
        int k1 = -1;
        for (int k = 0; k <= steps; ++k) {
            double th = rho0 - kPi + (kPi - rho0) * k / steps;
            if (hash.any_within(fiber(th), delta)) {
                th1 = th;
                k1 = k;
                break;
            }
        }
        if (k1 < 0) return std::nullopt;
        int k0 = -1;
        for (int k = k1 - 1; k >= 0; --k) {
            double th = rho0 - kPi + (kPi - rho0) * k / steps;
            if (hash.any_within(-fiber(th), delta)) {
                k0 = k;
                break;
            }
        }
        if (k0 < 0 || k1 - k0 < 2) return std::nullopt;
        const double th0 = rho0 - kPi + (kPi - rho0) * k0 / steps;
        const Vec3 b = fiber(0.5 * (th0 + th1));

        int count = 0;
        const int last = c.closed ? c.nodes() - 1 : c.nodes();
        for (int i = 0; i + 1 < c.nodes() && i < last; ++i) {
            const double f0 = b.dot(c.tangent(i)), f1 = b.dot(c.tangent(i + 1));
            if ((f0 >= 0) == (f1 >= 0)) continue;
            double lo = c.t[i], hi = c.t[i + 1], s = lo;
            for (int it = 0; it < 60; ++it) {
                s = 0.5 * (lo + hi);
                if ((b.dot(c.frame_at(s).col(1)) >= 0) == (f0 >= 0))
                    lo = s;
                else
                    hi = s;
            }
            Mat3 G = c.frame_at(s);
            double th = std::atan2(b.dot(G.col(2)), b.dot(G.col(0)));
            if (th > rho0 - kPi && th < 0) ++count;
        }
        return count;
    };

    std::vector<int> counts;
    const int tries = 12;
    const int last = c.closed ? c.nodes() - 1 : c.nodes();
    for (int k = 0; k < tries && counts.size() < 2; ++k) {
        const int seg = static_cast<int>(static_cast<long>(last) * k / tries);
        auto r = count_at(c.t[seg] + 0.5 * c.h[std::min(seg, c.segments() - 1)]);
        if (r) counts.push_back(*r);
    }
    if (counts.size() < 2) throw Error(ErrorCode::NoGapFound, "no fiber has a gap between -C and C");
    if (counts[0] != counts[1]) throw Error(ErrorCode::NoGapFound, "gap witnesses give different counts");
    return counts[0];
}

ComponentLabel classify_component(const AdmissibleCurve& c, const ToleranceProfile& tol) {
    ComponentLabel L;
    L.n = component_count(c.bounds);
    L.parity = lift_parity(c);
    ReducedCurve red = reduce_to_k0(c);
    L.status = condensed_status(red.curve, tol);
    L.condensed = L.status.condensed;
    L.borderline = L.status.borderline;
    if (L.condensed) L.nu = condensed_nu(red.curve, L.status, tol, nullptr);
    if (L.nu && *L.nu <= L.n - 2) {
        L.j = *L.nu;
    } else {
        const int sign_nm1 = ((L.n - 1) % 2 == 0) ? 1 : -1;
        L.j = (L.parity == sign_nm1) ? L.n - 1 : L.n;
    }
    return L;
}

double total_curvature_bound(double rho0, int nu) {
    const double c = std::cos(0.5 * rho0);
    return 4 * kPi * nu / (c * c);
}

double equatorial_inequality_slack(double rho0, double l2, double l4, double l6) {
    if (!(rho0 > 0 && rho0 <= kPi / 2)) throw Error(ErrorCode::DomainError, "rho0 must lie in (0, pi/2]");
    for (double l : {l2, l4, l6})
        if (!(l >= 0 && l <= kPi / 2)) throw Error(ErrorCode::DomainError, "lambda must lie in [0, pi/2]");
    if (std::abs(l2 + l4 + l6 - kPi) > 1e-12) throw Error(ErrorCode::DomainError, "lambdas must sum to pi");
    double s = 0;
    for (double l : {l2, l4, l6}) s += std::asin(std::cos(rho0) * std::sin(l));
    return s - (kPi - 2 * rho0);
}

bool equatorial_inequality_check(double rho0, double l2, double l4, double l6) {
    return equatorial_inequality_slack(rho0, l2, l4, l6) >= -1e-12;
}

}  // namespace spherecurve
