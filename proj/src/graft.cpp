#include "spherecurve/graft.hpp"

#include "spherecurve/homotopy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace spherecurve {

namespace {

constexpr double kArcTurn = 0.05;
constexpr double kSimplexTurn = 0.05;
constexpr double kInteriorFraction = 1e-3;

double weight_before(const std::vector<double>& x, const std::vector<double>& d, double t, bool inclusive) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < t || (inclusive && x[i] == t)) s += d[i];
    return s;
}

double quat_distance(const Quat& a, const Quat& b) {
    return Quat(a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z).norm();
}

Quat end_lift(const AdmissibleCurve& c) {
    return c.z.back();
}

}  // namespace

GraftingFunction GraftingFunction::identity(double T) {
    GraftingFunction f;
    f.s0 = f.s1 = T;
    return f;
}

double GraftingFunction::operator()(double t) const {
    return t + weight_before(x_plus, d_plus, t, false) + weight_before(x_minus, d_minus, t, true);
}

double GraftingFunction::right_limit(double t) const {
    return t + weight_before(x_plus, d_plus, t, true) + weight_before(x_minus, d_minus, t, true);
}

double GraftingFunction::left_limit(double t) const {
    return t + weight_before(x_plus, d_plus, t, false) + weight_before(x_minus, d_minus, t, false);
}

bool GraftingFunction::valid(double tol) const {
    if (x_plus.size() != d_plus.size() || x_minus.size() != d_minus.size()) return false;
    if (!std::is_sorted(x_plus.begin(), x_plus.end()) || !std::is_sorted(x_minus.begin(), x_minus.end()))
        return false;
    double total = 0;
    for (size_t i = 0; i < x_plus.size(); ++i) {
        if (!(d_plus[i] > 0) || x_plus[i] < 0 || x_plus[i] > s0) return false;
        if (i > 0 && x_plus[i] == x_plus[i - 1]) return false;
        total += d_plus[i];
    }
    for (size_t i = 0; i < x_minus.size(); ++i) {
        if (!(d_minus[i] > 0) || x_minus[i] < 0 || x_minus[i] > s0) return false;
        if (i > 0 && x_minus[i] == x_minus[i - 1]) return false;
        total += d_minus[i];
    }
    return std::abs(s0 + total - s1) <= tol * std::max(1.0, s1);
}

GraftingFunction compose_grafting(const GraftingFunction& phi0, const GraftingFunction& phi1) {
    const double scale = std::max({1.0, phi0.s1, phi1.s0});
    if (std::abs(phi0.s1 - phi1.s0) > 1e-12 * scale)
        throw Error(ErrorCode::DomainMismatch, "codomain of the first map differs from the domain of the second");

    // jump locations of phi0 with their total weights, sorted
    std::vector<std::pair<double, double>> jumps;
    for (size_t i = 0; i < phi0.x_plus.size(); ++i) jumps.emplace_back(phi0.x_plus[i], phi0.d_plus[i]);
    for (size_t i = 0; i < phi0.x_minus.size(); ++i) jumps.emplace_back(phi0.x_minus[i], phi0.d_minus[i]);
    std::sort(jumps.begin(), jumps.end());

    auto preimage = [&](double y) {
        double offset = 0;
        for (const auto& [x, w] : jumps) {
            if (y < x + offset) return y - offset;
            if (y <= x + offset + w) return x;
            offset += w;
        }
        return std::min(y - offset, phi0.s0);
    };

    std::vector<double> cand;
    for (const auto& j : jumps) cand.push_back(j.first);
    for (double y : phi1.x_plus) cand.push_back(preimage(y));
    for (double y : phi1.x_minus) cand.push_back(preimage(y));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    GraftingFunction out;
    out.s0 = phi0.s0;
    out.s1 = phi1.s1;
    const double eps = 1e-14 * std::max(1.0, out.s1);
    for (double x : cand) {
        const double mid = phi1(phi0(x));
        const double up = phi1.right_limit(phi0.right_limit(x)) - mid;
        const double down = mid - phi1.left_limit(phi0.left_limit(x));
        if (up > eps) {
            out.x_plus.push_back(x);
            out.d_plus.push_back(up);
        }
        if (down > eps) {
            out.x_minus.push_back(x);
            out.d_minus.push_back(down);
        }
    }
    return out;
}

AdmissibleCurve insert_arcs(const AdmissibleCurve& g, std::vector<InsertedArc> arcs) {
    std::stable_sort(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    std::vector<double> h, v, kappa;
    auto push_arc = [&](const InsertedArc& a) {
        if (!(a.sigma > 0)) return;
        if (!(a.rho > 0 && a.rho < kPi)) throw Error(ErrorCode::DomainError, "arc radius must lie in (0, pi)");
        const int pieces = std::max(1, static_cast<int>(std::ceil(a.sigma / kArcTurn)));
        for (int k = 0; k < pieces; ++k) {
            h.push_back(a.sigma / pieces);
            v.push_back(std::sin(a.rho));
            kappa.push_back(cot_radius(a.rho));
        }
    };
    auto push_piece = [&](int seg, double len) {
        if (len <= 0) return;
        h.push_back(len);
        v.push_back(g.v[seg]);
        kappa.push_back(g.kappa[seg]);
    };

    size_t next = 0;
    for (int i = 0; i < g.segments(); ++i) {
        double start = g.t[i];
        while (next < arcs.size() && arcs[next].t <= start) push_arc(arcs[next++]);
        while (next < arcs.size() && arcs[next].t < g.t[i + 1]) {
            push_piece(i, arcs[next].t - start);
            start = arcs[next].t;
            push_arc(arcs[next++]);
        }
        push_piece(i, g.t[i + 1] - start);
    }
    while (next < arcs.size()) push_arc(arcs[next++]);
    AdmissibleCurve out = build_curve(g.bounds, std::move(h), std::move(v), std::move(kappa), g.z[0]);
    out.closed = g.closed;
    return out;
}

double pullback_defect(const AdmissibleCurve& base, const AdmissibleCurve& result, const GraftingFunction& phi) {
    double worst = 0;
    for (int i = 0; i < base.segments(); ++i) {
        const double u = 0.5 * (base.t[i] + base.t[i + 1]);
        const int j = result.segment_at(phi(u));
        worst = std::max(worst, (base.omega(i) - result.omega(j)).norm());
    }
    return worst;
}

GraftResult graft_antipodal_circles(const AdmissibleCurve& c, double s, const ToleranceProfile& tol) {
    if (!(s >= 0)) throw Error(ErrorCode::DomainError, "turning amount must be nonnegative");
    const AdmissibleCurve g = reparametrize_by_curvature(c);
    const double rho0 = g.bounds.rho0(), rho2 = g.bounds.rho2;
    CausticCloud cloud = caustic_cloud(reduce_to_k0(g).curve, tol);

    AntipodalWitness any = find_antipodal_pair(cloud, 0.0, rho0, tol);
    if (!(any.defect < tol.antipodal)) throw Error(ErrorCode::NotDiffuse, "no antipodal pair on the caustic band");
    AntipodalWitness w =
        find_antipodal_pair(cloud, kInteriorFraction * rho0, (1 - kInteriorFraction) * rho0, tol);
    if (!(w.defect < tol.antipodal))
        throw Error(ErrorCode::AntipodalDefect, "antipodal pairs only at the boundary of the band, defect " +
                                                    std::to_string(w.defect));
    if (w.t1 > w.t2) {
        std::swap(w.t1, w.t2);
        std::swap(w.theta1, w.theta2);
    }

    GraftResult out;
    out.record.phi = GraftingFunction::identity(g.domain());
    if (s == 0) {
        out.curve = g;
        return out;
    }
    out.record.arcs = {{w.t1, w.theta1 + rho2, s}, {w.t2, w.theta2 + rho2, s}};
    out.curve = insert_arcs(g, out.record.arcs);

    GraftingFunction& phi = out.record.phi;
    phi.s1 = g.domain() + 2 * s;
    if (w.t1 == w.t2) {
        phi.x_minus = {w.t1};
        phi.d_minus = {2 * s};
    } else {
        phi.x_minus = {w.t1, w.t2};
        phi.d_minus = {s, s};
    }
    out.record.frame_residual = quat_distance(end_lift(out.curve), end_lift(g));
    return out;
}

GraftResult graft_simplex_step(const AdmissibleCurve& c, double s, const ToleranceProfile& tol) {
    if (!(s >= 0)) throw Error(ErrorCode::DomainError, "increment must be nonnegative");
    const AdmissibleCurve g = reparametrize_by_curvature(c);
    const double rho0 = g.bounds.rho0(), rho2 = g.bounds.rho2;
    const AdmissibleCurve reduced = reduce_to_k0(g).curve;

    const AdmissibleCurve dense = densify(reduced, 0.01);
    std::vector<Vec3> fibers;
    for (int i = 0; i < dense.nodes(); ++i)
        for (double th : {0.0, 0.5 * rho0, rho0}) fibers.push_back(band_point(dense, i, th));
    if (!origin_in_hull_interior(fibers, tol))
        throw Error(ErrorCode::NotNonCondensed, "caustic band lies in a closed hemisphere");

    // candidate vertices on a coarse grid with interior fiber parameters
    const AdmissibleCurve coarse = densify(reduced, kSimplexTurn);
    const int M = 9;
    const double lo = kInteriorFraction * rho0, hi = (1 - kInteriorFraction) * rho0;
    std::vector<Vec3> pts;
    std::vector<std::pair<double, double>> where;
    for (int i = 0; i + 1 < coarse.nodes() || (!coarse.closed && i < coarse.nodes()); ++i)
        for (int j = 0; j < M; ++j) {
            const double th = lo + (hi - lo) * j / (M - 1);
            pts.push_back(band_point(coarse, i, th));
            where.emplace_back(coarse.t[i], th);
        }
    SphericalSimplex simplex = containing_simplex(pts, Vec3::Zero(), tol);
    if (simplex.indices.size() != 4)
        throw Error(ErrorCode::DegenerateSimplex, "origin is not interior to a tetrahedron of caustic points");

    struct Vertex {
        double t, rho, weight;
        Vec3 chi;
    };
    std::vector<Vertex> vs;
    for (int k = 0; k < 4; ++k) {
        const auto [t, th] = where[simplex.indices[k]];
        vs.push_back({t, th + rho2, simplex.weights[k], band_point_at(g, t, th + rho2)});
    }
    std::stable_sort(vs.begin(), vs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    Mat3 D;
    for (int k = 0; k < 3; ++k) D.col(k) = vs[k + 1].chi - vs[0].chi;
    if (!(std::abs(D.determinant()) > 1e-10))
        throw Error(ErrorCode::DegenerateSimplex, "simplex vertices are not in general position");
    const double wsum = vs[0].weight + vs[1].weight + vs[2].weight + vs[3].weight;

    auto product = [&](const Eigen::Vector4d& sig, std::array<Quat, 4>* E) {
        std::array<Quat, 4> e;
        for (int k = 0; k < 4; ++k) e[k] = quat_exp(0.5 * sig[k] * vs[k].chi);
        if (E) *E = e;
        return e[0] * e[1] * e[2] * e[3];
    };
    auto residual = [&](const Eigen::Vector4d& sig, double target) {
        Quat G = product(sig, nullptr);
        Eigen::Vector4d r(G.x, G.y, G.z, sig.sum() - target);
        return std::make_pair(r, G.w);
    };
    // Newton on (Im G = 0, sum sigma = target) from `sig`; false if it stalls
    auto newton = [&](Eigen::Vector4d& sig, double target) {
        auto [r, gw] = residual(sig, target);
        for (int it = 0; it < tol.newton_iterations; ++it) {
            if (r.norm() < tol.newton_tol && gw > 0) return true;
            std::array<Quat, 4> e;
            product(sig, &e);
            Eigen::Matrix4d J;
            for (int k = 0; k < 4; ++k) {
                Quat d = Quat(1, 0, 0, 0);
                for (int m = 0; m < 4; ++m) d = d * (m == k ? Quat::pure(0.5 * vs[m].chi) * e[m] : e[m]);
                J.col(k) << d.x, d.y, d.z, 1.0;
            }
            Eigen::Vector4d step = J.partialPivLu().solve(-r);
            double lambda = 1.0;
            bool accepted = false;
            for (int k = 0; k < 30; ++k, lambda *= 0.5) {
                Eigen::Vector4d trial = sig + lambda * step;
                auto [rt, gt] = residual(trial, target);
                if (rt.norm() < r.norm()) {
                    sig = trial;
                    r = rt;
                    gw = gt;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
        return r.norm() < tol.newton_tol && gw > 0;
    };

    Eigen::Vector4d sig;
    for (int k = 0; k < 4; ++k) sig[k] = s * vs[k].weight / wsum;
    bool ok = s == 0 || newton(sig, s);
    // continuation in the total increment, refining the substeps on failure
    for (int parts = 2; !ok && parts <= 256; parts *= 2) {
        Eigen::Vector4d cur = Eigen::Vector4d::Zero();
        ok = true;
        for (int p = 1; p <= parts && ok; ++p) {
            const double target = s * p / parts;
            Eigen::Vector4d pred = cur;
            for (int k = 0; k < 4; ++k) pred[k] += (s / parts) * vs[k].weight / wsum;
            ok = newton(pred, target) && pred.minCoeff() >= 0;
            cur = pred;
        }
        sig = cur;
    }
    if (!ok || sig.minCoeff() < 0)
        throw Error(ErrorCode::ContinuationDiverged, "no nonnegative solution of G = 1 at this increment");

    GraftResult out;
    out.record.phi = GraftingFunction::identity(g.domain());
    for (const auto& vx : vs) out.record.weights.push_back(vx.weight / wsum);
    if (s == 0) {
        out.curve = g;
        return out;
    }
    for (int k = 0; k < 4; ++k)
        if (sig[k] > 0) out.record.arcs.push_back({vs[k].t, vs[k].rho, sig[k]});
    out.curve = insert_arcs(g, out.record.arcs);

    GraftingFunction& phi = out.record.phi;
    phi.s1 = g.domain() + sig.sum();
    for (const auto& a : out.record.arcs) {
        if (!phi.x_minus.empty() && phi.x_minus.back() == a.t)
            phi.d_minus.back() += a.sigma;
        else {
            phi.x_minus.push_back(a.t);
            phi.d_minus.push_back(a.sigma);
        }
    }
    out.record.frame_residual = quat_distance(end_lift(out.curve), end_lift(g));
    if (out.record.frame_residual > 1e-8)
        throw Error(ErrorCode::ContinuationDiverged,
                    "lifted end frame moved by " + std::to_string(out.record.frame_residual));
    return out;
}

GraftChain graft_chain(const AdmissibleCurve& c, double step, double budget, const ToleranceProfile& tol) {
    if (!(step > 0)) throw Error(ErrorCode::DomainError, "step must be positive");
    GraftChain ch;
    ch.curve = reparametrize_by_curvature(c);
    ch.tot.push_back(total_curvature(ch.curve));
    const double rho0 = ch.curve.bounds.rho0();
    bool bound_known = false;
    double h = step;
    for (;;) {
        const AdmissibleCurve reduced = reduce_to_k0(ch.curve).curve;
        CondensedStatus st = condensed_status(reduced, tol);
        ch.status = st.tag;
        if (st.condensed || st.diffuse) break;
        if (!bound_known) {
            bound_known = true;
            try {
                const double b = total_curvature_bound(rho0, rotation_number_nondiffuse(reduced, tol));
                ch.bound = b * (1 + 1e-9);
            } catch (const Error&) {
                ch.bound = kInf;
            }
        }
        if (total_curvature(reduced) >= ch.bound) {
            ch.bound_violated = true;
            break;
        }
        const double remaining = budget - ch.accumulated;
        if (remaining <= 1e-12 * std::max(1.0, budget)) {
            ch.budget_exhausted = true;
            break;
        }
        GraftResult r;
        double inc = 0;
        for (;;) {
            try {
                inc = std::min(h, remaining);
                r = graft_simplex_step(ch.curve, inc, tol);
                break;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ContinuationDiverged || h < 1e-6) throw;
                h *= 0.5;
            }
        }
        ch.accumulated += inc;
        ch.curve = std::move(r.curve);
        ch.tot.push_back(total_curvature(ch.curve));
        ch.records.push_back(std::move(r.record));
        h = std::min(step, 2 * h);
    }
    return ch;
}

GraftChain graft_until_resolved(const AdmissibleCurve& c, double step, double budget, const ToleranceProfile& tol) {
    GraftChain ch = graft_chain(c, step, budget, tol);
    if (ch.bound_violated)
        throw Error(ErrorCode::BoundViolation, "total curvature passed the non-diffuse bound while still non-diffuse");
    if (ch.budget_exhausted)
        throw Error(ErrorCode::BudgetExceeded, "grafting budget spent before the curve became condensed or diffuse");
    return ch;
}

AdmissibleCurve neither_example(double rho0, double rho1, int n, double reach) {
    if (!(rho1 > 0 && rho1 < rho0 && rho0 < kPi / 2))
        throw Error(ErrorCode::DomainError, "need 0 < rho1 < rho0 < pi/2");
    const int K = 4096;
    std::vector<Vec3> pts;
    pts.reserve(K);
    for (int k = 0; k < K; ++k) {
        const double phi = kPi * k / K, r = reach * std::cos(3 * phi);
        pts.emplace_back(std::sin(r) * std::cos(phi), std::sin(r) * std::sin(phi), std::cos(r));
    }
    const AdmissibleCurve beta = curve_from_points(pts, CurvatureBounds::make(-kInf, kInf));
    const CurvatureBounds target = CurvatureBounds::make(cot_radius(rho0), kInf);
    const double rho_cap = rho0 - 0.01;
    for (int m = n > 0 ? n : 16; m <= (n > 0 ? n : 4096); m *= 2) {
        AdmissibleCurve c = with_bounds(spread_loops(beta, m, rho1), target);
        if (n > 0 || radius_range(c).max < rho_cap) return c;
    }
    throw Error(ErrorCode::CurvatureBoundTooTight, "loops too coarse for the requested bounds");
}

}  // namespace spherecurve
