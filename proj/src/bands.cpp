#include "spherecurve/bands.hpp"

#include <algorithm>
#include <cmath>

namespace spherecurve {

namespace {

// Point of the cylinder in the frame of a meridian: the meridian is the half
// circle (cos t, 0, sin t) and `dpsi` the unrolled longitude offset.
Vec3 local_point(double dpsi, double lat) {
    return {std::cos(lat) * std::cos(dpsi), std::cos(lat) * std::sin(dpsi), std::sin(lat)};
}

struct Reach {
    bool found = false;
    double t = 0;
    Vec3 foot = Vec3::Zero();
};

struct Nearest {
    double dist = kInf;
    Vec3 foot = Vec3::Zero();
};

// Lower bound for the distance of q to the half meridian x >= 0, y = 0.
double meridian_gap(const Vec3& q) {
    if (q.x() >= 0) return std::asin(std::min(1.0, std::abs(q.y())));
    return std::acos(std::min(1.0, std::abs(q.z())));
}

// Boundary polyline through (psi_j, theta[j]) with cached trigonometry; node(k, o)
// is node k + o in the frame of meridian k.
class Polyline {
public:
    Polyline(const AcceptableBand& b, const std::vector<double>& theta)
        : K_(b.nodes()), W_(std::max(1, b.nodes() / (2 * b.nu))), sp_(b.spacing()) {
        cl_.resize(K_);
        sl_.resize(K_);
        for (int j = 0; j < K_; ++j) {
            cl_[j] = std::cos(theta[j]);
            sl_[j] = std::sin(theta[j]);
        }
        co_.resize(2 * W_ + 1);
        so_.resize(2 * W_ + 1);
        for (int o = -W_; o <= W_; ++o) {
            co_[o + W_] = std::cos(o * sp_);
            so_[o + W_] = std::sin(o * sp_);
        }
    }

    Vec3 node(int k, int o) const {
        const int j = ((k + o) % K_ + K_) % K_;
        return {cl_[j] * co_[o + W_], cl_[j] * so_[o + W_], sl_[j]};
    }

    // Extreme latitude (largest when `upper`, else smallest) of the meridian of node
    // k inside {x : d(x, polyline) <= D}, a union of vertex discs and segment slabs
    // each met in closed form.
    Reach reach(int k, double D, bool upper) const {
        const double cD = std::cos(D), sD = std::sin(D), lim = 0.5 * kPi - 1e-12;
        Reach best;
        auto offer = [&](double t, const Vec3& foot) {
            t = std::clamp(t, -lim, lim);
            if (!best.found || (upper ? t > best.t : t < best.t)) {
                best.found = true;
                best.t = t;
                best.foot = foot;
            }
        };
        Vec3 a = node(k, -W_);
        double gap_a = meridian_gap(a);
        for (int o = -W_; o <= W_; ++o) {
            const Vec3 q = o == -W_ ? a : node(k, o);
            const double gap = o == -W_ ? gap_a : meridian_gap(q);
            if (gap <= D) {
                const double A = std::hypot(q.x(), q.z());
                if (A >= cD) {
                    const double alpha = std::atan2(q.z(), q.x()), beta = std::acos(std::min(1.0, cD / A));
                    offer(upper ? alpha + beta : alpha - beta, q);
                }
            }
            if (o > -W_ && std::min(gap, gap_a) <= D + sp_) slab(a, q, sD, offer);
            a = q;
            gap_a = gap;
        }
        return best;
    }

    // Distance of x (in the frame of meridian k) to the polyline.
    Nearest nearest(int k, const Vec3& x) const {
        Nearest best;
        Vec3 a = node(k, -W_);
        for (int o = -W_; o <= W_; ++o) {
            const Vec3 q = o == -W_ ? a : node(k, o);
            const double d = angle_between(x, q);
            if (d < best.dist) best = {d, q};
            if (o > -W_) {
                Vec3 m = a.cross(q);
                const double mn = m.norm();
                if (mn > 1e-15) {
                    m /= mn;
                    if (x.dot(m.cross(a)) >= 0 && x.dot(m.cross(q)) <= 0) {
                        const double ds = std::asin(std::min(1.0, std::abs(x.dot(m))));
                        if (ds < best.dist) best = {ds, (x - x.dot(m) * m).normalized()};
                    }
                }
            }
            a = q;
        }
        return best;
    }

private:
    // Meridian points on the boundary of the slab of half-width D about segment aq
    // whose projection falls inside the segment.
    template <class Offer>
    static void slab(const Vec3& a, const Vec3& q, double sD, Offer& offer) {
        Vec3 m = a.cross(q);
        const double mn = m.norm();
        if (mn <= 1e-15) return;
        m /= mn;
        const double B = std::hypot(m.x(), m.z());
        if (B <= sD) return;
        const double g = std::atan2(m.z(), m.x());
        const Vec3 ma = m.cross(a), mq = m.cross(q);
        for (double sgn : {1.0, -1.0}) {
            const double ac = std::acos(std::clamp(sgn * sD / B, -1.0, 1.0));
            for (double t : {g + ac, g - ac}) {
                t = std::remainder(t, 2 * kPi);
                if (std::abs(t) >= 0.5 * kPi) continue;
                const Vec3 x(std::cos(t), 0.0, std::sin(t));
                if (x.dot(ma) < -1e-12 || x.dot(mq) > 1e-12) continue;
                offer(t, (x - x.dot(m) * m).normalized());
            }
        }
    }

    int K_, W_;
    double sp_;
    std::vector<double> cl_, sl_, co_, so_;
};

}  // namespace

BandDistances boundary_distances(const AcceptableBand& band) {
    BandDistances out;
    const int K = band.nodes();
    out.from_plus.resize(K);
    out.from_minus.resize(K);
    const Polyline lower(band, band.theta_minus), upper(band, band.theta_plus);
    for (int k = 0; k < K; ++k) {
        out.from_plus[k] = lower.nearest(k, local_point(0, band.theta_plus[k])).dist;
        out.from_minus[k] = upper.nearest(k, local_point(0, band.theta_minus[k])).dist;
        out.min = std::min({out.min, out.from_plus[k], out.from_minus[k]});
        out.max = std::max({out.max, out.from_plus[k], out.from_minus[k]});
    }
    return out;
}

bool is_acceptable(const AcceptableBand& band, double tau) {
    for (int k = 0; k < band.nodes(); ++k) {
        if (band.theta_plus[k] < -tau || band.theta_plus[k] > band.R + tau) return false;
        if (band.theta_minus[k] > tau || band.theta_minus[k] < -band.R - tau) return false;
    }
    return boundary_distances(band).min >= band.R - tau;
}

bool is_good(const AcceptableBand& band, double tau) {
    if (!is_acceptable(band, tau)) return false;
    return boundary_distances(band).max <= band.R + tau;
}

AcceptableBand maximal_band(int nu, double R, int K) {
    AcceptableBand b;
    b.nu = nu;
    b.R = R;
    b.theta_plus.assign(K, R);
    b.theta_minus.assign(K, -R);
    return b;
}

AcceptableBand symmetric_band(int nu, double R, int K) {
    AcceptableBand b = maximal_band(nu, R, K);
    b.theta_plus.assign(K, 0.5 * R);
    b.theta_minus.assign(K, -0.5 * R);
    return b;
}

AcceptableBand contract_band(const AcceptableBand& band, double s) {
    if (!(s >= 0 && s <= 1)) throw Error(ErrorCode::DomainError, "contraction parameter must lie in [0, 1]");
    AcceptableBand out = band;
    for (int k = 0; k < band.nodes(); ++k) {
        out.theta_plus[k] = (1 - s) * band.theta_plus[k] + s * band.R;
        out.theta_minus[k] = (1 - s) * band.theta_minus[k] - s * band.R;
    }
    return out;
}

Retraction retract_to_good(const AcceptableBand& band, double tau, int max_iterations) {
    if (!(band.R > 0 && band.R < 0.5 * kPi)) throw Error(ErrorCode::DomainError, "band width must lie in (0, pi/2)");
    Retraction out;
    out.band = band;
    AcceptableBand& b = out.band;
    const int K = b.nodes();
    for (int n = 1; n <= max_iterations; ++n) {
        const double D = b.R + std::ldexp(1.0, -n);
        double change = 0;
        if (n % 2 == 1) {
            std::vector<double> next(K);
            const Polyline lower(b, b.theta_minus);
            for (int k = 0; k < K; ++k) {
                Reach r = lower.reach(k, D, true);
                double t = r.found ? std::min(b.theta_plus[k], r.t) : b.theta_plus[k];
                next[k] = std::max(t, std::min(0.0, b.theta_plus[k]));
                change = std::max(change, std::abs(next[k] - b.theta_plus[k]));
                if (next[k] > b.theta_plus[k]) out.monotone = false;
            }
            b.theta_plus = std::move(next);
        } else {
            std::vector<double> next(K);
            const Polyline upper(b, b.theta_plus);
            for (int k = 0; k < K; ++k) {
                Reach r = upper.reach(k, D, false);
                double t = r.found ? std::max(b.theta_minus[k], r.t) : b.theta_minus[k];
                next[k] = std::min(t, std::max(0.0, b.theta_minus[k]));
                change = std::max(change, std::abs(next[k] - b.theta_minus[k]));
                if (next[k] < b.theta_minus[k]) out.monotone = false;
            }
            b.theta_minus = std::move(next);
        }
        out.iterations = n;
        out.changes.push_back(change);
        if (change < 0.25 * tau && std::ldexp(1.0, -n) < 0.25 * tau) return out;
    }
    throw Error(ErrorCode::NonConvergence, "band retraction did not settle");
}

Vec3 cover_point(const CoverFrame& f, double psi, double lat) {
    return std::cos(lat) * (std::cos(psi) * f.e1 + std::sin(psi) * f.e2) + std::sin(lat) * f.e3;
}

CondensedBand band_from_condensed(const AdmissibleCurve& c, double extension, int K, const ToleranceProfile& tol) {
    if (K < 16) throw Error(ErrorCode::DomainError, "need at least 16 meridians");
    const AdmissibleCurve reduced = reduce_to_k0(c).curve;
    const double rho0 = reduced.bounds.rho0();
    if (!(rho0 > 0.5 * kPi)) throw Error(ErrorCode::DomainError, "band construction needs kappa0 < 0");
    const double R = kPi - rho0 + 2 * extension;
    if (!(extension >= 0 && R < 0.5 * kPi)) throw Error(ErrorCode::DomainError, "band width must stay below pi/2");
    if (!is_condensed(reduced, tol).condensed)
        throw Error(ErrorCode::NotCondensed, "caustic band is not in a closed hemisphere");
    Vec3 h;
    const int nu = rotation_number_condensed(reduced, tol, &h);
    if (nu < 1) throw Error(ErrorCode::NonpositiveRotation, "rotation number must be positive");

    CondensedBand out;
    PlaneFrame pf = projection_frame(h);
    out.frame = {pf.v1, pf.v2, pf.pole};
    out.extension = extension;
    GoodBand& band = out.band;
    band.nu = nu;
    band.R = R;
    band.theta_plus.assign(K, -kInf);
    band.theta_minus.assign(K, kInf);

    const AdmissibleCurve dense = densify(reduced, std::min(0.01, kPi * nu / K));
    const double sp = band.spacing();
    auto trace = [&](double theta, std::vector<double>& out_theta, bool upper) {
        const int N = dense.nodes();
        std::vector<double> psi(N), lat(N);
        for (int i = 0; i < N; ++i) {
            const Vec3 p = band_point(dense, i, theta);
            lat[i] = std::asin(std::clamp(p.dot(out.frame.e3), -1.0, 1.0));
            psi[i] = std::atan2(p.dot(out.frame.e2), p.dot(out.frame.e1));
            if (i > 0) psi[i] = psi[i - 1] + std::remainder(psi[i] - psi[i - 1], 2 * kPi);
        }
        const double turns = (psi.back() - psi.front()) / (2 * kPi);
        if (std::abs(turns - nu) > 0.25)
            throw Error(ErrorCode::MeridianMiss, "band boundary winds " + std::to_string(turns) +
                                                     " times around the axis instead of " + std::to_string(nu));
        for (int i = 0; i + 1 < N; ++i) {
            const double g0 = psi[i] / sp, g1 = psi[i + 1] / sp;
            const double lo = std::min(g0, g1), hi = std::max(g0, g1);
            for (long j = static_cast<long>(std::ceil(lo)); j <= static_cast<long>(std::floor(hi)); ++j) {
                const double w = hi > lo ? (j - g0) / (g1 - g0) : 0.0;
                const double l = (1 - w) * lat[i] + w * lat[i + 1];
                const int k = static_cast<int>(((j % K) + K) % K);
                out_theta[k] = upper ? std::max(out_theta[k], l) : std::min(out_theta[k], l);
            }
        }
    };
    trace(extension, band.theta_plus, true);
    trace(rho0 - kPi - extension, band.theta_minus, false);
    for (int k = 0; k < K; ++k)
        if (!std::isfinite(band.theta_plus[k]) || !std::isfinite(band.theta_minus[k]))
            throw Error(ErrorCode::MeridianMiss, "a meridian misses the band boundary");
    out.distances = boundary_distances(band);
    return out;
}

CentralCurve central_curve(const GoodBand& band, const CoverFrame& frame) {
    const int K = band.nodes();
    const double r = 0.5 * band.R, sp = band.spacing();
    CentralCurve out;
    std::vector<Vec3> local(K), dir(K);
    std::vector<double> foot_plus(K), foot_minus(K);
    out.points.resize(K);
    const Polyline upper(band, band.theta_plus), lower(band, band.theta_minus);
    for (int k = 0; k < K; ++k) {
        Reach reach = upper.reach(k, r, false);
        if (!reach.found) throw Error(ErrorCode::MeridianMiss, "meridian never reaches distance R/2 from the boundary");
        const double t = std::clamp(reach.t, band.theta_minus[k], band.theta_plus[k]);
        local[k] = local_point(0, t);
        out.points[k] = cover_point(frame, band.psi(k), t);
        const Vec3& f = reach.foot;
        dir[k] = (f - f.dot(local[k]) * local[k]).normalized();
        foot_plus[k] = std::atan2(f.y(), f.x());
        const Vec3 g = lower.nearest(k, local[k]).foot;
        foot_minus[k] = std::atan2(g.y(), g.x());
    }
    for (int k = 0; k < K; ++k) {
        const int k1 = (k + 1) % K;
        out.track_clearance = std::min({out.track_clearance, sp + foot_plus[k1] - foot_plus[k],
                                        sp + foot_minus[k1] - foot_minus[k]});
        // next point and direction expressed in the frame of meridian k
        const double c = std::cos(sp), s = std::sin(sp);
        auto rot = [&](const Vec3& v) { return Vec3(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()); };
        const Vec3 p1 = rot(local[k1]);
        Vec3 d1 = rot(dir[k1]);
        d1 -= d1.dot(local[k]) * local[k];
        const double dist = angle_between(local[k], p1);
        if (dist > 0 && d1.norm() > 0) out.lipschitz = std::max(out.lipschitz, angle_between(dir[k], d1) / dist);
    }
    if (out.track_clearance < -0.5 * sp)
        throw Error(ErrorCode::TrackCrossing, "nearest-boundary tracks of neighbouring points cross");
    out.curve = curve_from_points(out.points, CurvatureBounds::make(-kInf, kInf));
    RadiusRange rr = radius_range(out.curve);
    out.rho_min = rr.min;
    out.rho_max = rr.max;
    out.margin = std::min(rr.min - r, kPi - r - rr.max);
    return out;
}

HomotopyPath collapse_condensed(const AdmissibleCurve& c, int half, int K, const ToleranceProfile& tol) {
    if (half < 1) throw Error(ErrorCode::DomainError, "need at least one step per half");
    const AdmissibleCurve reduced = reduce_to_k0(c).curve;
    const double rho0 = reduced.bounds.rho0();
    if (!(rho0 > 0.5 * kPi)) throw Error(ErrorCode::DomainError, "circle collapse through bands needs kappa0 < 0");
    const double rho1 = 0.5 * (kPi - rho0);
    const double margin = curvature_margin(reduced, reduced.bounds);
    const double e = std::min(0.5 * margin, 0.45 * (rho0 - 0.5 * kPi));
    CondensedBand cb = band_from_condensed(c, e, K, tol);
    const double tau = tol.band;

    HomotopyPath path;
    path.bounds = c.bounds;
    path.provenance = "custom";
    auto push = [&](const AcceptableBand& b, double s) {
        Retraction ret = retract_to_good(b, tau);
        CentralCurve cc = central_curve(ret.band, cb.frame);
        AdmissibleCurve g = with_bounds(translate_curve(cc.curve, rho1), reduced.bounds);
        if (c.bounds.rho2 > 0) g = translate_curve(g, -c.bounds.rho2);
        path.curves.push_back(with_bounds(std::move(g), c.bounds));
        path.s.push_back(s);
    };
    for (int j = 0; j <= half; ++j) push(contract_band(cb.band, static_cast<double>(j) / half), 0.5 * j / half);
    const AcceptableBand sym = symmetric_band(cb.band.nu, cb.band.R, K);
    for (int j = half - 1; j >= 0; --j)
        push(contract_band(sym, static_cast<double>(j) / half), 1.0 - 0.5 * j / half);
    return path;
}

}  // namespace spherecurve
