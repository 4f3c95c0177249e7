#include "spherecurve/homotopy.hpp"

#include <algorithm>
#include <cmath>

namespace spherecurve {

namespace {

double sinc(double x) {
    return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

double det2(const Complex& a, const Complex& b) {
    return (std::conj(a) * b).imag();
}

Vec3 unit_or_throw(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0)) throw Error(ErrorCode::DomainError, "degenerate tangent");
    return v / n;
}

Quat frame_quat(const Vec3& p, const Vec3& t) {
    Mat3 F;
    F.col(0) = p;
    F.col(1) = t;
    F.col(2) = p.cross(t);
    return rotation_to_quat(F);
}

}  // namespace

ValidationReport validate_path(const HomotopyPath& path, const CurvatureBounds& bounds, const ToleranceProfile& tol) {
    ValidationReport r;
    for (const AdmissibleCurve& c : path.curves) {
        r.min_margin = std::min(r.min_margin, curvature_margin(c, bounds));
        r.max_defect = std::max(r.max_defect, closure_defect(c));
        int p = 0;
        try {
            p = lift_parity(c);
        } catch (const Error&) {
            p = 0;
        }
        r.parity.push_back(p);
    }
    const bool constant_parity =
        !r.parity.empty() && r.parity.front() != 0 &&
        std::all_of(r.parity.begin(), r.parity.end(), [&](int p) { return p == r.parity.front(); });
    r.pass = !path.curves.empty() && r.min_margin > 0 && r.max_defect < tol.closure && constant_parity;
    return r;
}

AdmissibleCurve bending_frame(int k, double s, double kappa1, int pieces) {
    if (k < 1 || pieces < 1 || !(s >= 0 && s <= 1)) throw Error(ErrorCode::DomainError, "need k >= 1, pieces >= 1, s in [0, 1]");
    const double threshold = std::tan(kPi / (2 * k + 2));
    if (!(kappa1 > threshold))
        throw Error(ErrorCode::CurvatureBoundTooTight, "kappa1 must exceed tan(pi / (2k + 2))");
    const CurvatureBounds bounds = CurvatureBounds::make(-kappa1, kappa1);
    const int arcs = 2 * k + 2;
    const Vec3 N(0, 0, 1);
    auto eq = [&](double t) { return Vec3(std::cos(2 * kPi * k * t), std::sin(2 * kPi * k * t), 0.0); };
    const double alpha = s * kPi;
    std::vector<double> h, v, kappa;
    std::vector<Vec3> centers(arcs);
    for (int i = 0; i < arcs; ++i) {
        const Vec3 P0 = eq(static_cast<double>(i) / arcs), P1 = eq(static_cast<double>(i + 1) / arcs);
        const Vec3 Q = eq((i + 0.5) / arcs);
        const double beta = (i % 2 == 0) ? alpha : -alpha;
        const double m = (0.5 * (P0 + P1)).norm();
        const double cb = std::cos(beta);
        const double lam = -m * cb + std::sqrt(std::max(0.0, m * m * cb * cb - m * m + 1.0));
        const Vec3 Qb = m * Q + lam * (cb * Q + std::sin(beta) * N);
        auto [center, rho] = circle_through(P0, Qb.normalized(), P1);
        centers[i] = center;
        const Vec3 a = P0 - P0.dot(center) * center, b = P1 - P1.dot(center) * center;
        double phi = std::atan2(center.dot(a.cross(b)), a.dot(b));
        if (phi <= 0) phi += 2 * kPi;
        const double len = std::sin(rho) * phi;
        for (int j = 0; j < pieces; ++j) {
            h.push_back(1.0 / (arcs * pieces));
            v.push_back(len * arcs);
            kappa.push_back(cot_radius(rho));
        }
    }
    for (int i = 0; i < arcs; ++i) {
        const Vec3 P = eq(static_cast<double>(i + 1) / arcs);
        const Vec3 t_end = centers[i].cross(P).normalized();
        const Vec3 t_start = centers[(i + 1) % arcs].cross(P).normalized();
        if ((t_end - t_start).norm() > 1e-8) throw Error(ErrorCode::DomainError, "bending arcs do not meet tangentially");
    }
    return build_curve(bounds, std::move(h), std::move(v), std::move(kappa), Quat());
}

HomotopyPath bend_k_equator(int k, int S, double kappa1, int pieces) {
    if (S < 2) throw Error(ErrorCode::DomainError, "need S >= 2");
    HomotopyPath path;
    path.provenance = "bending";
    for (int step = 0; step < S; ++step) {
        const double s = static_cast<double>(step) / (S - 1);
        path.s.push_back(s);
        path.curves.push_back(bending_frame(k, s, kappa1, pieces));
    }
    path.bounds = path.curves.front().bounds;
    return path;
}

Vec3 loop_circle(double rho1, double u) {
    const double c = std::cos(rho1), s = std::sin(rho1);
    const double a = 2 * kPi * u;
    return c * Vec3(c, 0, s) + s * Vec3(s * std::cos(a), std::sin(a), -c * std::cos(a));
}

AdmissibleCurve add_loops(const AdmissibleCurve& c, double t0, int n_loops, double rho_small, double eps) {
    if (n_loops < 0) throw Error(ErrorCode::DomainError, "loop count must be nonnegative");
    if (n_loops == 0) return c;
    if (!(rho_small > c.bounds.rho2 && rho_small < c.bounds.rho1))
        throw Error(ErrorCode::RadiusOutOfBounds, "loop radius must lie strictly between rho2 and rho1");
    const double T = c.domain();
    if (!(eps > 0) || !(t0 - 2 * eps > 0) || !(t0 + 2 * eps < T))
        throw Error(ErrorCode::ParameterOverlap, "the 2 epsilon window around t0 leaves the domain");
    const double b0 = t0 - 2 * eps, b2 = t0 + 2 * eps;
    std::vector<double> h, v, kappa;
    bool inserted = false;
    auto insert_loop = [&]() {
        const int parts = 16 * n_loops;
        for (int j = 0; j < parts; ++j) {
            h.push_back(2 * eps / parts);
            v.push_back(2 * kPi * n_loops * std::sin(rho_small) / (2 * eps));
            kappa.push_back(cot_radius(rho_small));
        }
        inserted = true;
    };
    for (int i = 0; i < c.segments(); ++i) {
        std::vector<double> cuts{c.t[i]};
        for (double b : {b0, t0, b2})
            if (b > c.t[i] && b < c.t[i + 1]) cuts.push_back(b);
        cuts.push_back(c.t[i + 1]);
        for (size_t j = 0; j + 1 < cuts.size(); ++j) {
            const double a = cuts[j], b = cuts[j + 1];
            if (!inserted && a >= t0) insert_loop();
            if (b - a <= 0) continue;
            const double mid = 0.5 * (a + b);
            const bool squeezed = mid > b0 && mid < b2;
            h.push_back(squeezed ? 0.5 * (b - a) : b - a);
            v.push_back(squeezed ? 2 * c.v[i] : c.v[i]);
            kappa.push_back(c.kappa[i]);
        }
    }
    if (!inserted) insert_loop();
    return build_curve(c.bounds, std::move(h), std::move(v), std::move(kappa), c.z[0]);
}

AdmissibleCurve spread_loops(const AdmissibleCurve& c, int n, double rho1, int samples_per_loop) {
    if (n < 1) throw Error(ErrorCode::DomainError, "loop count must be positive");
    if (!(rho1 > 0 && rho1 < kPi)) throw Error(ErrorCode::DomainError, "rho1 must lie in (0, pi)");
    const AdmissibleCurve g = rescale_domain(reparametrize_by_curvature(c), 1.0);
    const int M = std::max(4 * g.segments(), samples_per_loop * n);
    const double cr = std::cos(rho1), sr = std::sin(rho1), w = 2 * kPi * n;
    std::vector<double> h(M, 1.0 / M), v(M), kappa(M);
    for (int k = 0; k < M; ++k) {
        const double u = (k + 0.5) / M;
        const Vec3 om = g.omega(g.segment_at(u));
        const double a = w * u, ca = std::cos(a), sa = std::sin(a);
        const Vec3 y = loop_circle(rho1, n * u);
        const Vec3 y1 = w * sr * Vec3(-sr * sa, ca, cr * sa);
        const Vec3 y2 = w * w * sr * Vec3(-sr * ca, -sa, cr * ca);
        const Vec3 d1 = om.cross(y) + y1;
        const Vec3 d2 = om.cross(om.cross(y)) + 2 * om.cross(y1) + y2;
        v[k] = d1.norm();
        kappa[k] = y.dot(d1.cross(d2)) / (v[k] * v[k] * v[k]);
    }
    return close_by_correction(build_curve(c.bounds, std::move(h), std::move(v), std::move(kappa), g.z[0]));
}

int PlanarCurve::turns() const {
    return static_cast<int>(std::lround(theta.back() / (2 * kPi)));
}

namespace {

// Integral of exp(i theta) over [t_j, u] inside piece j.
Complex piece_integral(const PlanarCurve& c, int j, double u) {
    const double d = (c.theta[j + 1] - c.theta[j]) / (c.t[j + 1] - c.t[j]);
    const double D = u - c.t[j];
    return D * std::polar(1.0, c.theta[j] + 0.5 * d * D) * sinc(0.5 * d * D);
}

int piece_at(const PlanarCurve& c, double u) {
    auto it = std::upper_bound(c.t.begin(), c.t.end(), u);
    return std::clamp(static_cast<int>(it - c.t.begin()) - 1, 0, static_cast<int>(c.t.size()) - 2);
}

double theta_at(const PlanarCurve& c, int j, double u) {
    return c.theta[j] + (c.theta[j + 1] - c.theta[j]) * (u - c.t[j]) / (c.t[j + 1] - c.t[j]);
}

}  // namespace

Complex PlanarCurve::mean_velocity() const {
    Complex acc = 0;
    for (size_t j = 0; j + 1 < t.size(); ++j) acc += piece_integral(*this, static_cast<int>(j), t[j + 1]);
    return L * z * acc;
}

Complex PlanarCurve::point(double u) const {
    const int jj = piece_at(*this, u);
    Complex acc = 0;
    for (int j = 0; j < jj; ++j) acc += piece_integral(*this, j, t[j + 1]);
    acc += piece_integral(*this, jj, u);
    return start + L * z * acc - mean_velocity() * u;
}

Complex PlanarCurve::velocity(double u) const {
    const int j = piece_at(*this, u);
    return L * z * std::polar(1.0, theta_at(*this, j, u)) - mean_velocity();
}

Complex PlanarCurve::acceleration(double u) const {
    const int j = piece_at(*this, u);
    const double d = (theta[j + 1] - theta[j]) / (t[j + 1] - t[j]);
    return L * z * Complex(0, d) * std::polar(1.0, theta_at(*this, j, u));
}

double PlanarCurve::curvature(double u) const {
    const Complex a = velocity(u), b = acceleration(u);
    return det2(a, b) / std::pow(std::abs(a), 3);
}

double PlanarCurve::min_curvature(int per_piece) const {
    const Complex m = mean_velocity();
    double best = kInf;
    for (size_t j = 0; j + 1 < t.size(); ++j) {
        const double d = (theta[j + 1] - theta[j]) / (t[j + 1] - t[j]);
        for (int q = 0; q <= per_piece; ++q) {
            const double u = t[j] + (t[j + 1] - t[j]) * q / per_piece;
            const Complex e = std::polar(1.0, theta_at(*this, static_cast<int>(j), u));
            const Complex a = L * z * e - m, b = L * z * Complex(0, d) * e;
            best = std::min(best, det2(a, b) / std::pow(std::abs(a), 3));
        }
    }
    return best;
}

double PlanarCurve::max_radius(int samples) const {
    double best = 0;
    for (int k = 0; k <= samples; ++k) best = std::max(best, std::abs(point(static_cast<double>(k) / samples)));
    return best;
}

std::vector<PlanarCurve> planar_wg_homotopy(const PlanarCurve& eta, int S) {
    if (S < 2) throw Error(ErrorCode::DomainError, "need at least two steps");
    const int N = eta.turns();
    if (N <= 0) throw Error(ErrorCode::NonpositiveRotation, "rotation number must be positive");
    if (std::abs(eta.theta.back() - 2 * kPi * N) > 1e-9 || eta.theta.front() != 0)
        throw Error(ErrorCode::InvalidInput, "angle function must run from 0 to 2 pi N");
    std::vector<PlanarCurve> out;
    for (int k = 0; k < S; ++k) {
        const double s = static_cast<double>(k) / (S - 1);
        PlanarCurve c = eta;
        for (size_t j = 0; j < c.t.size(); ++j) c.theta[j] = (1 - s) * eta.theta[j] + s * 2 * kPi * N * eta.t[j];
        out.push_back(std::move(c));
    }
    return out;
}

AdmissibleCurve lift_planar(const PlanarCurve& eta, const Vec3& h, const CurvatureBounds& bounds, int M) {
    const PlaneFrame pf = projection_frame(h);
    const Complex m = eta.mean_velocity();
    std::vector<double> hs(M, 1.0 / M), v(M), kappa(M);
    auto lift = [&](const Complex& x, const Complex& x1, const Complex& x2, Vec3& c, Vec3& c1, Vec3& c2) {
        const double r2 = std::norm(x);
        if (!(r2 < 1)) throw Error(ErrorCode::DomainError, "plane curve leaves the unit disk");
        const double w = std::sqrt(1 - r2);
        const double xx1 = (std::conj(x) * x1).real(), xx2 = (std::conj(x) * x2).real();
        c = x.real() * pf.v1 + x.imag() * pf.v2 + w * h;
        c1 = x1.real() * pf.v1 + x1.imag() * pf.v2 - (xx1 / w) * h;
        c2 = x2.real() * pf.v1 + x2.imag() * pf.v2 - ((std::norm(x1) + xx2) / w + xx1 * xx1 / (w * w * w)) * h;
    };
    // Walk the pieces once, accumulating the exact integral of exp(i theta).
    Complex acc = 0;
    int j = 0;
    auto integral_to = [&](double u) {
        while (j + 2 < static_cast<int>(eta.t.size()) && eta.t[j + 1] <= u) {
            acc += piece_integral(eta, j, eta.t[j + 1]);
            ++j;
        }
        return acc + piece_integral(eta, j, u);
    };
    for (int k = 0; k < M; ++k) {
        const double u = (k + 0.5) / M;
        const Complex x = eta.start + eta.L * eta.z * integral_to(u) - m * u;
        const double th = theta_at(eta, j, u);
        const double d = (eta.theta[j + 1] - eta.theta[j]) / (eta.t[j + 1] - eta.t[j]);
        const Complex e = std::polar(1.0, th);
        const Complex x1 = eta.L * eta.z * e - m, x2 = eta.L * eta.z * Complex(0, d) * e;
        Vec3 c, c1, c2;
        lift(x, x1, x2, c, c1, c2);
        v[k] = c1.norm();
        kappa[k] = c.dot(c1.cross(c2)) / (v[k] * v[k] * v[k]);
    }
    Vec3 c, c1, c2;
    lift(eta.start, eta.L * eta.z - m, Complex(0, 0), c, c1, c2);
    const AdmissibleCurve raw = build_curve(bounds, std::move(hs), std::move(v), std::move(kappa),
                                            frame_quat(c, unit_or_throw(c1)));
    return close_by_correction(raw);
}

AdmissibleCurve dilate_curve(const AdmissibleCurve& c, double r, const Vec3& h) {
    if (!(r > 0 && r <= 1)) throw Error(ErrorCode::DomainError, "dilatation factor must lie in (0, 1]");
    auto plane = [&](const Vec3& p, const Vec3& tp, Vec3& Y, Vec3& dY) {
        const double den = 1 + p.dot(h);
        if (den < 1e-8) throw Error(ErrorCode::DegenerateProjection, "curve passes through the projection pole");
        const Vec3 q = p - p.dot(h) * h;
        Y = q / den;
        dY = (tp - tp.dot(h) * h) / den - q * tp.dot(h) / (den * den);
    };
    const int N = c.segments();
    std::vector<double> v(N), kappa(N);
    for (int i = 0; i < N; ++i) {
        const Mat3 F = c.frame_at(c.t[i] + 0.5 * c.h[i]);
        Vec3 Y, dY;
        plane(F.col(0), F.col(1), Y, dY);
        const Vec3 nu = h.cross(dY.normalized());
        const double y2 = Y.squaredNorm();
        const double ke = 2 / (1 + y2) * (c.kappa[i] - Y.dot(nu));
        kappa[i] = (1 + r * r * y2) / 2 * (ke / r) + r * Y.dot(nu);
        v[i] = c.v[i] * r * (1 + y2) / (1 + r * r * y2);
    }
    Vec3 Y, dY;
    plane(c.point(0), c.tangent(0), Y, dY);
    const Vec3 Z = r * Y, dZ = r * dY;
    const double z2 = Z.squaredNorm(), zd = Z.dot(dZ);
    const Vec3 p = (2 * Z + (1 - z2) * h) / (1 + z2);
    const Vec3 dp = (2 * dZ - 2 * zd * h) / (1 + z2) - (2 * Z + (1 - z2) * h) * (2 * zd) / ((1 + z2) * (1 + z2));
    const AdmissibleCurve raw =
        build_curve(c.bounds, c.h, std::move(v), std::move(kappa), frame_quat(p.normalized(), unit_or_throw(dp)));
    return close_by_correction(raw);
}

namespace {

// Orthogonal projection of a spherical curve to the tangent plane at h, as a
// piecewise-linear angle function in normalized arc length.
PlanarCurve project_curve(const AdmissibleCurve& c, const Vec3& h, int& N) {
    const PlaneFrame pf = projection_frame(h);
    auto P = [&](const Vec3& x) { return Complex(x.dot(pf.v1), x.dot(pf.v2)); };
    const int S = c.segments();
    std::vector<double> len(S), turn(S);
    double L = 0;
    for (int i = 0; i < S; ++i) {
        const Mat3 F = c.frame_at(c.t[i] + 0.5 * c.h[i]);
        const double vv = c.v[i], w = vv * c.kappa[i];
        const Complex x1 = P(vv * F.col(1)), x2 = P(vv * (-vv * F.col(0) + w * F.col(2)));
        const double sp = std::abs(x1);
        len[i] = c.h[i] * sp;
        turn[i] = det2(x1, x2) / (sp * sp * sp) * len[i];
        L += len[i];
    }
    PlanarCurve pc;
    pc.L = L;
    pc.t.assign(S + 1, 0.0);
    pc.theta.assign(S + 1, 0.0);
    for (int i = 0; i < S; ++i) {
        pc.t[i + 1] = pc.t[i] + len[i] / L;
        pc.theta[i + 1] = pc.theta[i] + turn[i];
    }
    pc.t.back() = 1.0;
    N = static_cast<int>(std::lround(pc.theta.back() / (2 * kPi)));
    if (N <= 0) throw Error(ErrorCode::NonpositiveRotation, "projected curve has nonpositive rotation number");
    const double fix = 2 * kPi * N - pc.theta.back();
    for (int i = 0; i <= S; ++i) pc.theta[i] += fix * pc.t[i];
    pc.theta.back() = 2 * kPi * N;
    pc.z = P(c.tangent(0));
    pc.z /= std::abs(pc.z);
    pc.start = P(c.point(0));
    return pc;
}

}  // namespace

HomotopyPath shrink_condensed(const AdmissibleCurve& input, int S, const ToleranceProfile& tol) {
    if (S < 8) throw Error(ErrorCode::DomainError, "shrink needs at least 8 steps");
    const AdmissibleCurve red = reduce_to_k0(input).curve;
    const double kappa0 = red.bounds.kappa1;
    if (kappa0 < 0) throw Error(ErrorCode::DomainError, "shrink requires kappa0 >= 0 after reduction");
    if (!is_condensed(red, tol).condensed) throw Error(ErrorCode::NotCondensed, "curve is not condensed");
    Vec3 h;
    const int nu = rotation_number_condensed(red, tol, &h);
    const AdmissibleCurve base = densify(red, 0.05);

    // Dilatation factor: image within a small ball about h with curvature well above kappa0.
    double maxY = 0;
    for (int i = 0; i < base.nodes(); ++i) maxY = std::max(maxY, std::tan(0.5 * angle_between(h, base.point(i))));
    const double kth = kappa0 + 1;
    double r = std::min(1.0, std::tan(0.025) / maxY);
    AdmissibleCurve small;
    PlanarCurve planar;
    int N = 0;
    bool ok = false;
    for (int attempt = 0; attempt < 20 && !ok; ++attempt, r *= 0.5) {
        small = dilate_curve(base, r, h);
        double kmin = kInf;
        for (double k : small.kappa) kmin = std::min(kmin, k);
        if (kmin <= kappa0 + 2) continue;
        planar = project_curve(small, h, N);
        ok = planar.min_curvature() > kth;
        if (ok) break;
    }
    if (!ok) throw Error(ErrorCode::StageToleranceFailure, "projected curvature stays below kappa0 + 1");
    if (N != nu) throw Error(ErrorCode::StageToleranceFailure, "projected rotation number differs from nu");

    const int n1 = std::max(2, 3 * S / 8);
    const int ns = std::max(2, S / 8 + 1);
    const int nt = std::max(2, S / 8 + 1);
    const int nw = S - n1 - (ns - 1) - (nt - 1) + 1;

    HomotopyPath path;
    path.bounds = red.bounds;
    path.provenance = "shrink";
    auto push = [&](const AdmissibleCurve& c) { path.curves.push_back(normalize_start(c)); };

    for (int j = 0; j < n1; ++j) {
        const double rj = std::pow(r, static_cast<double>(j) / (n1 - 1));
        push(j == 0 ? base : j == n1 - 1 ? small : dilate_curve(base, rj, h));
    }

    // Common scale making the length 2 pi N R1 and keeping every angle-interpolated curve above kth.
    const double R1 = 0.9 * std::min(planar.L / (2 * kPi * N), 1.0 / kth);
    PlanarCurve target = planar;
    target.L = 2 * kPi * N * R1;
    double worst = kInf;
    for (const PlanarCurve& c : planar_wg_homotopy(target, nw)) worst = std::min(worst, c.min_curvature());
    const double lam = std::min(1.0, worst / (1.05 * kth));
    const double g = target.L * lam / planar.L;
    const int M = std::max(512, 128 * N);

    for (int j = 1; j < ns; ++j) {
        PlanarCurve c = planar;
        c.L = planar.L * std::pow(g, static_cast<double>(j) / (ns - 1));
        push(lift_planar(c, h, red.bounds, M));
    }
    PlanarCurve scaled = planar;
    scaled.L = planar.L * g;
    std::vector<PlanarCurve> wg = planar_wg_homotopy(scaled, nw);
    for (int j = 1; j < nw; ++j) {
        if (wg[j].min_curvature() <= kth)
            throw Error(ErrorCode::StageToleranceFailure, "planar curvature dips below kappa0 + 1");
        push(lift_planar(wg[j], h, red.bounds, M));
    }
    // Move the final circle's center to the origin so that its lift is a round circle.
    const PlanarCurve& last = wg.back();
    const Complex center = last.start + Complex(0, 1) * last.L * last.z / (2 * kPi * N);
    for (int j = 1; j < nt; ++j) {
        PlanarCurve c = last;
        c.start = last.start - center * (static_cast<double>(j) / (nt - 1));
        push(lift_planar(c, h, red.bounds, M));
    }
    for (int j = 0; j < static_cast<int>(path.curves.size()); ++j)
        path.s.push_back(static_cast<double>(j) / (path.curves.size() - 1));
    return path;
}

}  // namespace spherecurve
