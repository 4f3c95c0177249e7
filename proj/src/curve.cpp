#include "spherecurve/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace spherecurve {

double arccot(double kappa) {
    if (kappa == kInf) return 0.0;
    if (kappa == -kInf) return kPi;
    return std::atan2(1.0, kappa);
}

double cot_radius(double rho) {
    if (rho <= 0.0) return kInf;
    if (rho >= kPi) return -kInf;
    return std::cos(rho) / std::sin(rho);
}

CurvatureBounds CurvatureBounds::make(double kappa1, double kappa2) {
    if (!(kappa1 < kappa2) || std::isnan(kappa1) || std::isnan(kappa2) || kappa1 == kInf || kappa2 == -kInf)
        throw Error(ErrorCode::DomainError, "curvature bounds need kappa1 < kappa2");
    CurvatureBounds b;
    b.kappa1 = kappa1;
    b.kappa2 = kappa2;
    b.rho1 = arccot(kappa1);
    b.rho2 = arccot(kappa2);
    return b;
}

CurvatureBounds CurvatureBounds::from_radii(double rho1, double rho2) {
    if (!(rho2 < rho1) || rho2 < 0 || rho1 > kPi)
        throw Error(ErrorCode::DomainError, "radii need 0 <= rho2 < rho1 <= pi");
    CurvatureBounds b;
    b.rho1 = rho1;
    b.rho2 = rho2;
    b.kappa1 = cot_radius(rho1);
    b.kappa2 = cot_radius(rho2);
    return b;
}

double speed_transform(double v) { return v - 1.0 / v; }

double speed_transform_inv(double y) {
    const double r = std::sqrt(y * y + 4.0);
    return y >= 0 ? 0.5 * (y + r) : 2.0 / (r - y);
}

double curvature_transform(const CurvatureBounds& b, double k) {
    const bool lo = std::isfinite(b.kappa1), hi = std::isfinite(b.kappa2);
    if (!lo && !hi) return k;
    if (!lo) return k + 1.0 / (b.kappa2 - k);
    if (!hi) return k + 1.0 / (b.kappa1 - k);
    return 1.0 / (b.kappa1 - k) + 1.0 / (b.kappa2 - k);
}

double curvature_transform_inv(const CurvatureBounds& b, double y) {
    const bool lo = std::isfinite(b.kappa1), hi = std::isfinite(b.kappa2);
    if (!lo && !hi) return y;
    if (!lo || !hi) {
        // roots of t^2 - (y+c) t + (y c - 1) = 0; the one below c (upper bound) or above c (lower bound)
        const double c = lo ? b.kappa1 : b.kappa2;
        const double s = y + c;
        const double r = std::sqrt((y - c) * (y - c) + 4.0);
        const double prod = y * c - 1.0;
        if (!lo) return s > 0 ? 2.0 * prod / (s + r) : 0.5 * (s - r);
        return s < 0 ? 2.0 * prod / (s - r) : 0.5 * (s + r);
    }
    // strictly increasing on (kappa1, kappa2): safeguarded Newton
    double a = b.kappa1, c = b.kappa2;
    double t = 0.5 * (a + c);
    for (int it = 0; it < 200; ++it) {
        const double f = curvature_transform(b, t) - y;
        if (f == 0) break;
        if (f > 0) c = t; else a = t;
        const double d1 = 1.0 / ((b.kappa1 - t) * (b.kappa1 - t)) + 1.0 / ((b.kappa2 - t) * (b.kappa2 - t));
        double tn = t - f / d1;
        if (!(tn > a && tn < c)) tn = 0.5 * (a + c);
        if (std::abs(tn - t) <= 1e-16 * std::max(1.0, std::abs(t))) {
            t = tn;
            break;
        }
        t = tn;
    }
    return t;
}

ControlTransforms control_transforms(const CurvatureBounds& b) {
    return {speed_transform, speed_transform_inv,
            [b](double k) { return curvature_transform(b, k); },
            [b](double y) { return curvature_transform_inv(b, y); }};
}

int AdmissibleCurve::segment_at(double s) const {
    auto it = std::upper_bound(t.begin(), t.end(), s);
    int i = static_cast<int>(it - t.begin()) - 1;
    return std::clamp(i, 0, segments() - 1);
}

Quat AdmissibleCurve::lift_at(double s) const {
    const int i = segment_at(s);
    return z[i] * quat_exp(0.5 * (s - t[i]) * omega(i));
}

double closure_defect(const AdmissibleCurve& c) {
    return (c.frame(c.nodes() - 1) - c.frame(0)).cwiseAbs().maxCoeff();
}

namespace {

// Nodes from explicit segment data, integrating from z0.
AdmissibleCurve assemble(const CurvatureBounds& bounds, std::vector<double> h, std::vector<double> v,
                         std::vector<double> kappa, const Quat& z0, double closure_tol) {
    AdmissibleCurve c;
    c.bounds = bounds;
    const int N = static_cast<int>(h.size());
    c.t.resize(N + 1);
    c.z.resize(N + 1);
    c.t[0] = 0.0;
    c.z[0] = z0;
    c.h = std::move(h);
    c.v = std::move(v);
    c.kappa = std::move(kappa);
    for (int i = 0; i < N; ++i) {
        c.t[i + 1] = c.t[i] + c.h[i];
        c.z[i + 1] = c.z[i] * quat_exp(0.5 * c.h[i] * c.omega(i));
    }
    c.closed = closure_defect(c) < closure_tol;
    return c;
}

// Split segment i of c into `parts` pieces, keeping original nodes exact.
void split_into(const AdmissibleCurve& c, int i, int parts, AdmissibleCurve& out) {
    const double dh = c.h[i] / parts;
    for (int j = 0; j < parts; ++j) {
        out.h.push_back(dh);
        out.v.push_back(c.v[i]);
        out.kappa.push_back(c.kappa[i]);
        if (j > 0) {
            out.t.push_back(c.t[i] + j * dh);
            out.z.push_back(c.z[i] * quat_exp(0.5 * j * dh * c.omega(i)));
        }
    }
    out.t.push_back(c.t[i + 1]);
    out.z.push_back(c.z[i + 1]);
}

}  // namespace

AdmissibleCurve build_curve(const CurvatureBounds& bounds, std::vector<double> h, std::vector<double> v,
                            std::vector<double> kappa, const Quat& z0, double closure_tol) {
    if (h.empty() || h.size() != v.size() || h.size() != kappa.size())
        throw Error(ErrorCode::InvalidInput, "segment arrays must be nonempty and of equal size");
    for (size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0) || !(v[i] > 0) || !std::isfinite(kappa[i]))
            throw Error(ErrorCode::InvalidInput, "segments need positive duration and speed, finite curvature");
    }
    return assemble(bounds, std::move(h), std::move(v), std::move(kappa), z0, closure_tol);
}

AdmissibleCurve integrate_curve(const ControlPair& controls, const CurvatureBounds& bounds, const Mat3& Q0) {
    const size_t N = controls.v_hat.size();
    if (N < 16 || controls.w_hat.size() != N)
        throw Error(ErrorCode::InvalidInput, "controls need N >= 16 values of v_hat and w_hat");
    std::vector<double> h(N, 1.0 / N), v(N), kappa(N);
    for (size_t i = 0; i < N; ++i) {
        if (!std::isfinite(controls.v_hat[i]) || !std::isfinite(controls.w_hat[i]))
            throw Error(ErrorCode::InvalidInput, "controls must be finite");
        v[i] = speed_transform_inv(controls.v_hat[i]);
        kappa[i] = curvature_transform_inv(bounds, controls.w_hat[i]);
    }
    return build_curve(bounds, std::move(h), std::move(v), std::move(kappa), rotation_to_quat(Q0));
}

AdmissibleCurve curve_from_functions(const CurvatureBounds& bounds, const std::function<double(double)>& vf,
                                     const std::function<double(double)>& kf, int N, const Mat3& Q0) {
    std::vector<double> h(N, 1.0 / N), v(N), kappa(N);
    for (int i = 0; i < N; ++i) {
        const double s = (i + 0.5) / N;
        v[i] = vf(s);
        kappa[i] = kf(s);
    }
    return build_curve(bounds, std::move(h), std::move(v), std::move(kappa), rotation_to_quat(Q0));
}

AdmissibleCurve make_circle(double rho, int k, const CurvatureBounds& bounds, int N) {
    if (!(rho > bounds.rho2 && rho < bounds.rho1))
        throw Error(ErrorCode::RadiusOutOfBounds, "circle radius must lie strictly between rho2 and rho1");
    if (k < 1) throw Error(ErrorCode::DomainError, "traversal count must be positive");
    std::vector<double> h(N, 1.0 / N), v(N, 2.0 * kPi * k * std::sin(rho)), kappa(N, cot_radius(rho));
    return build_curve(bounds, std::move(h), std::move(v), std::move(kappa), Quat());
}

double total_curvature(const AdmissibleCurve& c) {
    double s = 0;
    for (int i = 0; i < c.segments(); ++i) s += c.h[i] * c.v[i] * std::sqrt(1.0 + c.kappa[i] * c.kappa[i]);
    return s;
}

double length(const AdmissibleCurve& c) {
    double s = 0;
    for (int i = 0; i < c.segments(); ++i) s += c.h[i] * c.v[i];
    return s;
}

AdmissibleCurve reparametrize_by_curvature(const AdmissibleCurve& c) {
    AdmissibleCurve out = c;
    double acc = 0;
    for (int i = 0; i < c.segments(); ++i) {
        const double K = std::sqrt(1.0 + c.kappa[i] * c.kappa[i]);
        out.h[i] = c.h[i] * c.v[i] * K;
        out.v[i] = 1.0 / K;
        acc += out.h[i];
        out.t[i + 1] = acc;
    }
    return out;
}

AdmissibleCurve reparametrize_arclength(const AdmissibleCurve& c) {
    AdmissibleCurve out = c;
    const double L = length(c);
    double acc = 0;
    for (int i = 0; i < c.segments(); ++i) {
        out.h[i] = c.h[i] * c.v[i] / L;
        out.v[i] = L;
        acc += out.h[i];
        out.t[i + 1] = acc;
    }
    out.t.back() = 1.0;
    return out;
}

AdmissibleCurve rescale_domain(const AdmissibleCurve& c, double T) {
    AdmissibleCurve out = c;
    const double f = T / c.domain();
    for (int i = 0; i < c.segments(); ++i) {
        out.h[i] = c.h[i] * f;
        out.v[i] = c.v[i] / f;
    }
    for (auto& x : out.t) x *= f;
    out.t.back() = T;
    return out;
}

int lift_parity(const AdmissibleCurve& c) {
    const double d = c.z.back().dot(c.z.front());
    if (std::abs(d) < 0.9)
        throw Error(ErrorCode::AmbiguousParity, "endpoint lifts are not close to +-z(0): " + std::to_string(d));
    return d > 0 ? 1 : -1;
}

RadiusRange radius_range(const AdmissibleCurve& c) {
    RadiusRange r;
    for (int i = 0; i < c.segments(); ++i) {
        const double rho = c.rho(i);
        r.min = std::min(r.min, rho);
        r.max = std::max(r.max, rho);
    }
    return r;
}

double curvature_margin(const AdmissibleCurve& c, const CurvatureBounds& b) {
    double m = kInf;
    for (int i = 0; i < c.segments(); ++i) m = std::min(m, b.rho_margin(c.rho(i)));
    return m;
}

AdmissibleCurve with_bounds(AdmissibleCurve c, const CurvatureBounds& b) {
    c.bounds = b;
    return c;
}

AdmissibleCurve rotate_curve(const AdmissibleCurve& c, const Quat& q) {
    AdmissibleCurve out = c;
    for (auto& z : out.z) z = q * z;
    return out;
}

AdmissibleCurve normalize_start(const AdmissibleCurve& c) {
    return rotate_curve(c, c.z.front().conj());
}

AdmissibleCurve refine(const AdmissibleCurve& c, int factor) {
    if (factor <= 1) return c;
    AdmissibleCurve out;
    out.bounds = c.bounds;
    out.closed = c.closed;
    out.t.push_back(c.t[0]);
    out.z.push_back(c.z[0]);
    for (int i = 0; i < c.segments(); ++i) split_into(c, i, factor, out);
    return out;
}

AdmissibleCurve densify(const AdmissibleCurve& c, double max_turn) {
    AdmissibleCurve out;
    out.bounds = c.bounds;
    out.closed = c.closed;
    out.t.push_back(c.t[0]);
    out.z.push_back(c.z[0]);
    for (int i = 0; i < c.segments(); ++i) {
        const double turn = c.h[i] * c.v[i] * std::sqrt(1.0 + c.kappa[i] * c.kappa[i]);
        const int parts = std::max(1, static_cast<int>(std::ceil(turn / max_turn)));
        split_into(c, i, parts, out);
    }
    return out;
}

namespace {

Vec3 rotation_vector(Quat q) {
    if (q.w < 0) q = -q;
    Vec3 u = q.vec();
    const double s = u.norm();
    if (s < 1e-300) return Vec3::Zero();
    return 2.0 * std::atan2(s, q.w) * u / s;
}

}  // namespace

AdmissibleCurve close_by_correction(const AdmissibleCurve& c, double tol) {
    const int N = c.segments();
    const double T = c.domain();
    std::vector<std::array<double, 3>> basis(N);
    for (int i = 0; i < N; ++i) {
        const double u = (c.t[i] + 0.5 * c.h[i]) / T;
        basis[i] = {1.0, std::cos(2 * kPi * u), std::sin(2 * kPi * u)};
    }
    auto apply = [&](const Eigen::Matrix<double, 6, 1>& a, std::vector<double>& v, std::vector<double>& k) {
        v = c.v;
        k = c.kappa;
        for (int i = 0; i < N; ++i) {
            double dk = 0, dv = 0;
            for (int j = 0; j < 3; ++j) {
                dk += a[j] * basis[i][j];
                dv += a[3 + j] * basis[i][j];
            }
            k[i] += dk;
            v[i] *= 1.0 + dv;
        }
    };
    auto residual = [&](const Eigen::Matrix<double, 6, 1>& a) -> Vec3 {
        std::vector<double> v, k;
        apply(a, v, k);
        Quat z = c.z[0];
        for (int i = 0; i < N; ++i) z = z * quat_exp(0.5 * c.h[i] * Vec3(v[i] * k[i], 0.0, v[i]));
        return rotation_vector(c.z[0].conj() * z);
    };

    Eigen::Matrix<double, 6, 1> a = Eigen::Matrix<double, 6, 1>::Zero();
    Vec3 r = residual(a);
    for (int it = 0; it < 30 && r.norm() > tol; ++it) {
        Eigen::Matrix<double, 3, 6> J;
        const double eps = 1e-7;
        for (int j = 0; j < 6; ++j) {
            Eigen::Matrix<double, 6, 1> ap = a, am = a;
            ap[j] += eps;
            am[j] -= eps;
            J.col(j) = (residual(ap) - residual(am)) / (2 * eps);
        }
        Eigen::Matrix<double, 6, 1> da = J.completeOrthogonalDecomposition().solve(r);
        double step = 1.0;
        Vec3 rn;
        for (int ls = 0; ls < 20; ++ls) {
            rn = residual(a - step * da);
            if (rn.norm() < r.norm()) break;
            step *= 0.5;
        }
        a -= step * da;
        r = rn;
    }
    std::vector<double> v, k;
    apply(a, v, k);
    return assemble(c.bounds, c.h, std::move(v), std::move(k), c.z[0], 1e-7);
}

std::pair<Vec3, double> circle_through(const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 n = (b - a).cross(c - b);
    const double nn = n.norm();
    if (!(nn > 0)) throw Error(ErrorCode::DomainError, "coincident points define no circle");
    Vec3 center = n / nn;
    return {center, angle_between(b, center)};
}

AdmissibleCurve curve_from_points(const std::vector<Vec3>& raw, const CurvatureBounds& bounds, double slack) {
    std::vector<Vec3> p;
    for (const auto& x : raw) p.push_back(x.normalized());
    if (p.size() > 1 && (p.front() - p.back()).norm() < 1e-12) p.pop_back();
    const int K = static_cast<int>(p.size());
    if (K < 16) throw Error(ErrorCode::InvalidInput, "need at least 16 distinct points");

    std::vector<double> node_kappa(K);
    std::vector<Vec3> node_tangent(K);
    for (int j = 0; j < K; ++j) {
        auto [center, rho] = circle_through(p[(j + K - 1) % K], p[j], p[(j + 1) % K]);
        node_kappa[j] = cot_radius(rho);
        node_tangent[j] = center.cross(p[j]).normalized();
    }
    std::vector<double> arc(K), kappa(K);
    double L = 0;
    for (int j = 0; j < K; ++j) {
        kappa[j] = 0.5 * (node_kappa[j] + node_kappa[(j + 1) % K]);
        const double r = std::sin(arccot(kappa[j]));
        const double chord = (p[(j + 1) % K] - p[j]).norm();
        arc[j] = 2.0 * r * std::asin(std::min(1.0, chord / (2.0 * r)));
        L += arc[j];
    }
    std::vector<double> h(K), v(K, L);
    for (int j = 0; j < K; ++j) h[j] = arc[j] / L;
    Mat3 F;
    F.col(0) = p[0];
    F.col(1) = node_tangent[0];
    F.col(2) = p[0].cross(node_tangent[0]);
    AdmissibleCurve c = close_by_correction(build_curve(bounds, h, v, kappa, rotation_to_quat(F)));

    const double pad = 1e-9;
    bool clamped = false;
    for (int i = 0; i < c.segments(); ++i) {
        const double rho = c.rho(i);
        if (bounds.rho_margin(rho) > 0) continue;
        if (bounds.rho_margin(rho) < -slack)
            throw Error(ErrorCode::InvalidInput, "sampled curvature lies outside the bounds");
        c.kappa[i] = cot_radius(std::clamp(rho, bounds.rho2 + pad, bounds.rho1 - pad));
        clamped = true;
    }
    if (clamped) c = build_curve(bounds, c.h, c.v, c.kappa, c.z[0]);
    return c;
}

}  // namespace spherecurve
