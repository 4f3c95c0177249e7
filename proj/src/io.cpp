#include "spherecurve/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spherecurve {

namespace {

Json extended(double x) {
    if (x == kInf) return "+inf";
    if (x == -kInf) return "-inf";
    return x;
}

double extended_from(const Json& j, const char* key) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "+inf" || s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw Error(ErrorCode::InvalidInput, std::string("bad value for ") + key + ": " + s);
    }
    if (!j.is_number()) throw Error(ErrorCode::InvalidInput, std::string(key) + " must be a number or +-inf");
    return j.get<double>();
}

std::vector<double> numbers(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw Error(ErrorCode::InvalidInput, std::string("missing array ") + key);
    std::vector<double> out;
    out.reserve(j[key].size());
    for (const Json& x : j[key]) {
        if (!x.is_number()) throw Error(ErrorCode::InvalidInput, std::string(key) + " must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

void dump_to(std::ostringstream& os, const Json& j) {
    switch (j.type()) {
    case Json::value_t::object: {
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',';
            first = false;
            os << Json(it.key()).dump() << ':';
            dump_to(os, it.value());
        }
        os << '}';
        break;
    }
    case Json::value_t::array: {
        os << '[';
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) os << ',';
            dump_to(os, j[i]);
        }
        os << ']';
        break;
    }
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        if (!std::isfinite(x)) {
            os << "null";
            break;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
        break;
    }
    default:
        os << j.dump();
    }
}

}  // namespace

Json bounds_to_json(const CurvatureBounds& b) {
    return {{"kappa1", extended(b.kappa1)}, {"kappa2", extended(b.kappa2)}};
}

CurvatureBounds bounds_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kappa1") || !j.contains("kappa2"))
        throw Error(ErrorCode::InvalidInput, "curvature bounds need kappa1 and kappa2");
    const double k1 = extended_from(j["kappa1"], "kappa1"), k2 = extended_from(j["kappa2"], "kappa2");
    if (!(k1 < k2) || k1 == kInf || k2 == -kInf) throw Error(ErrorCode::InvalidInput, "need kappa1 < kappa2");
    return CurvatureBounds::make(k1, k2);
}

Json curve_to_json(const AdmissibleCurve& c) {
    const int N = c.segments();
    Json j = bounds_to_json(c.bounds);
    j["n"] = N;
    std::vector<double> vh(N), wh(N);
    bool uniform = true;
    for (int i = 0; i < N; ++i) {
        vh[i] = speed_transform(c.v[i]);
        wh[i] = curvature_transform(c.bounds, c.kappa[i]);
        if (std::abs(c.h[i] - 1.0 / N) > 1e-15) uniform = false;
    }
    j["v_hat"] = vh;
    j["w_hat"] = wh;
    const Mat3 Q = c.frame(0);
    std::vector<double> q0(9);
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k) q0[3 * r + k] = Q(r, k);
    j["q0"] = q0;
    if (!uniform) j["h"] = c.h;
    return j;
}

AdmissibleCurve curve_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "curve JSON must be an object");
    CurvatureBounds b = j.contains("kappa1") || j.contains("kappa2") ? bounds_from_json(j) : CurvatureBounds{};
    if (j.contains("gamma")) {
        if (!j["gamma"].is_array()) throw Error(ErrorCode::InvalidInput, "gamma must be an array of points");
        std::vector<Vec3> pts;
        for (const Json& p : j["gamma"]) {
            if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
                throw Error(ErrorCode::InvalidInput, "gamma points must be [x, y, z]");
            Vec3 x(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
            if (x.norm() < 1e-12) throw Error(ErrorCode::InvalidInput, "gamma point at the origin");
            pts.push_back(x.normalized());
        }
        return curve_from_points(pts, b);
    }
    const std::vector<double> vh = numbers(j, "v_hat"), wh = numbers(j, "w_hat");
    if (vh.size() != wh.size()) throw Error(ErrorCode::InvalidInput, "v_hat and w_hat differ in length");
    if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<long long>() != static_cast<long long>(vh.size())))
        throw Error(ErrorCode::InvalidInput, "n does not match the control arrays");
    Mat3 Q0 = Mat3::Identity();
    if (j.contains("q0")) {
        const std::vector<double> q = numbers(j, "q0");
        if (q.size() != 9) throw Error(ErrorCode::InvalidInput, "q0 needs 9 numbers");
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k) Q0(r, k) = q[3 * r + k];
        if ((Q0.transpose() * Q0 - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 || Q0.determinant() < 0)
            throw Error(ErrorCode::InvalidInput, "q0 is not a rotation");
    }
    if (!j.contains("h")) return integrate_curve({vh, wh}, b, Q0);
    std::vector<double> h = numbers(j, "h"), v(vh.size()), kappa(vh.size());
    if (h.size() != vh.size() || h.empty()) throw Error(ErrorCode::InvalidInput, "h does not match the control arrays");
    for (size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0) || !std::isfinite(h[i]) || !std::isfinite(vh[i]) || !std::isfinite(wh[i]))
            throw Error(ErrorCode::InvalidInput, "durations must be positive and controls finite");
        v[i] = speed_transform_inv(vh[i]);
        kappa[i] = curvature_transform_inv(b, wh[i]);
    }
    return build_curve(b, std::move(h), std::move(v), std::move(kappa), rotation_to_quat(Q0));
}

Json label_to_json(const ComponentLabel& label) {
    Json w = Json::object();
    const CondensedStatus& s = label.status;
    w["status"] = status_name(s.tag);
    w["margin"] = s.margin;
    w["h"] = {s.h.x(), s.h.y(), s.h.z()};
    if (std::isfinite(s.antipodal.defect))
        w["antipodal"] = {{"t1", s.antipodal.t1},
                          {"theta1", s.antipodal.theta1},
                          {"t2", s.antipodal.t2},
                          {"theta2", s.antipodal.theta2},
                          {"defect", s.antipodal.defect}};
    Json j = {{"n", label.n},
              {"j", label.j},
              {"condensed", label.condensed},
              {"parity", label.parity},
              {"borderline", label.borderline},
              {"witnesses", w}};
    j["nu"] = label.nu ? Json(*label.nu) : Json(nullptr);
    return j;
}

Json report_to_json(const ValidationReport& r) {
    return {{"pass", r.pass},
            {"min_margin", std::isfinite(r.min_margin) ? Json(r.min_margin) : Json(nullptr)},
            {"max_defect", r.max_defect},
            {"parity", r.parity}};
}

Json grafting_to_json(const GraftingFunction& phi) {
    return {{"s0", phi.s0},         {"s1", phi.s1},         {"x_plus", phi.x_plus},
            {"d_plus", phi.d_plus}, {"x_minus", phi.x_minus}, {"d_minus", phi.d_minus}};
}

Json graft_record_to_json(const GraftRecord& r) {
    Json arcs = Json::array();
    for (const InsertedArc& a : r.arcs) arcs.push_back({{"t", a.t}, {"rho", a.rho}, {"sigma", a.sigma}});
    return {{"base_id", r.base_id},
            {"result_id", r.result_id},
            {"phi", grafting_to_json(r.phi)},
            {"arcs", arcs},
            {"frame_residual", r.frame_residual},
            {"weights", r.weights}};
}

#define SPHERECURVE_TOL_FIELDS(X)                                                                            \
    X(unit_norm) X(orthonormal) X(feasibility) X(closure) X(antipodal) X(member_factor) X(borderline)        \
    X(winding_residual) X(band) X(band_nodes) X(samples) X(theta_nodes) X(path_steps) X(graft_step)            \
    X(newton_iterations) X(newton_tol) X(lattice) X(seed)

ToleranceProfile tolerance_from_json(const Json& j, ToleranceProfile base) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "tolerance profile must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (!it.value().is_number()) throw Error(ErrorCode::InvalidInput, "tolerance " + key + " must be a number");
        bool known = false;
#define X(name)                                                          \
    if (key == #name) {                                                  \
        base.name = it.value().get<decltype(base.name)>();               \
        known = true;                                                    \
    }
        SPHERECURVE_TOL_FIELDS(X)
#undef X
        if (!known) throw Error(ErrorCode::InvalidInput, "unknown tolerance " + key);
    }
    return base;
}

Json tolerance_to_json(const ToleranceProfile& tol) {
    Json j = Json::object();
#define X(name) j[#name] = tol.name;
    SPHERECURVE_TOL_FIELDS(X)
#undef X
    return j;
}

std::string band_profile_csv(const AcceptableBand& band) {
    std::ostringstream os;
    os << "k,psi,theta_plus,theta_minus\n";
    char buf[128];
    for (int k = 0; k < band.nodes(); ++k) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", k, band.psi(k), band.theta_plus[k],
                      band.theta_minus[k]);
        os << buf;
    }
    return os.str();
}

Json band_to_json(const AcceptableBand& band) {
    return {{"nu", band.nu}, {"R", band.R}, {"theta_plus", band.theta_plus}, {"theta_minus", band.theta_minus}};
}

std::string dump_json(const Json& j) {
    std::ostringstream os;
    dump_to(os, j);
    return os.str();
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace spherecurve
