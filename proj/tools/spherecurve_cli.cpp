#include "spherecurve/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace spherecurve;

namespace {

struct Common {
    std::string tol_profile;
    std::string output;
};

ToleranceProfile load_tolerances(const Common& common) {
    ToleranceProfile tol;
    if (const char* seed = std::getenv("SPHERECURVE_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(seed, &end, 10);
        if (end == seed || *end != '\0') throw Error(ErrorCode::InvalidInput, "SPHERECURVE_SEED must be an integer");
        tol.seed = v;
    }
    if (!common.tol_profile.empty()) tol = tolerance_from_json(read_json_file(common.tol_profile), tol);
    return tol;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
        }
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }
    void line(const Json& j) { out() << dump_json(j) << '\n'; }

private:
    std::unique_ptr<std::ofstream> file_;
};

AdmissibleCurve load_curve(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        try {
            return curve_from_json(Json::parse(ss.str()));
        } catch (const Json::parse_error& e) {
            throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
        }
    }
    return curve_from_json(read_json_file(path));
}

// Reads a JSONL path: every line with control arrays is a curve, other lines are
// skipped.
std::vector<AdmissibleCurve> load_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    std::vector<AdmissibleCurve> curves;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw Error(ErrorCode::InvalidInput, std::string("malformed JSONL: ") + e.what());
        }
        if (j.contains("curve")) j = j["curve"];
        if (j.is_object() && (j.contains("v_hat") || j.contains("gamma"))) curves.push_back(curve_from_json(j));
    }
    if (curves.empty()) throw Error(ErrorCode::InvalidInput, "no curves in " + path);
    return curves;
}

void emit_path(Output& out, const HomotopyPath& path, const ToleranceProfile& tol, int& status) {
    for (const AdmissibleCurve& c : path.curves) out.line(curve_to_json(c));
    const ValidationReport r = validate_path(path, path.bounds, tol);
    Json report = report_to_json(r);
    report["frames"] = path.curves.size();
    report["provenance"] = path.provenance;
    out.line({{"report", report}});
    if (!r.pass) status = 1;
}

double parse_extended(const std::string& s) {
    if (s == "-inf") return -kInf;
    if (s == "+inf" || s == "inf") return kInf;
    size_t used = 0;
    double x = 0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw Error(ErrorCode::InvalidInput, "bad curvature bound " + s);
    return x;
}

CurvatureBounds parse_bounds(const std::string& k1, const std::string& k2) {
    return bounds_from_json({{"kappa1", parse_extended(k1)}, {"kappa2", parse_extended(k2)}});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curves on the sphere with bounded geodesic curvature"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--tol-profile", common.tol_profile, "JSON file overriding tolerance fields");
    app.add_option("-o,--output", common.output, "output file (default stdout)");
    int status = 0;
    std::function<void()> run;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a curve");
    std::string kind, g_k1 = "-inf", g_k2 = "+inf";
    double g_rho = kPi / 2, g_s = 0.5, g_rho0 = 0.4, g_rho1 = 0.2, g_kappa = 1.5;
    int g_k = 1, g_n = 1024, g_loops = 0;
    gen->add_option("kind", kind, "circle | bending-frame | neither-example")
        ->required()
        ->check(CLI::IsMember({"circle", "bending-frame", "neither-example"}));
    gen->add_option("--rho", g_rho, "circle radius");
    gen->add_option("--k", g_k, "traversals (circle) or equator multiplicity (bending)");
    gen->add_option("--kappa1", g_k1, "lower curvature bound, number or -inf");
    gen->add_option("--kappa2", g_k2, "upper curvature bound, number or +inf");
    gen->add_option("--n", g_n, "samples (circle)");
    gen->add_option("--s", g_s, "bending parameter in [0, 1]");
    gen->add_option("--bend-kappa", g_kappa, "bending bound kappa1, bounds (-kappa1, kappa1)");
    gen->add_option("--rho0", g_rho0, "neither example: rho0 of the bounds (cot rho0, +inf)");
    gen->add_option("--rho1", g_rho1, "neither example: loop radius");
    gen->add_option("--loops", g_loops, "neither example: loop count, 0 picks automatically");
    gen->callback([&] {
        run = [&] {
            Output out(common.output);
            AdmissibleCurve c;
            if (kind == "circle") c = make_circle(g_rho, g_k, parse_bounds(g_k1, g_k2), g_n);
            else if (kind == "bending-frame") c = bending_frame(g_k, g_s, g_kappa);
            else c = neither_example(g_rho0, g_rho1, g_loops);
            out.line(curve_to_json(c));
        };
    });

    // classify
    auto* classify = app.add_subcommand("classify", "component label of a closed curve");
    std::string input;
    bool strict = false;
    classify->add_option("input", input, "curve JSON file or - for stdin")->required();
    classify->add_flag("--strict", strict, "exit 3 on borderline status");
    classify->callback([&] {
        run = [&] {
            const ToleranceProfile tol = load_tolerances(common);
            const ComponentLabel label = classify_component(load_curve(input), tol);
            Output out(common.output);
            out.line(label_to_json(label));
            if (strict && label.borderline) status = 3;
        };
    });

    // bend
    auto* bend = app.add_subcommand("bend", "bending of the k-equator as JSONL");
    int b_k = 1, b_steps = 65, b_pieces = 16;
    double b_kappa = 1.01;
    bend->add_option("--k", b_k, "equator multiplicity");
    bend->add_option("--steps", b_steps, "frames");
    bend->add_option("--kappa1", b_kappa, "bounds (-kappa1, kappa1)");
    bend->add_option("--pieces", b_pieces, "segments per arc");
    bend->callback([&] {
        run = [&] {
            const ToleranceProfile tol = load_tolerances(common);
            Output out(common.output);
            emit_path(out, bend_k_equator(b_k, b_steps, b_kappa, b_pieces), tol, status);
        };
    });

    // loops
    auto* loops = app.add_subcommand("loops", "add loops at a point, or spread loops along the curve");
    double l_t0 = 0.5, l_rho = 0.1, l_eps = 0.01;
    int l_count = 1, l_spread = 0;
    loops->add_option("input", input, "curve JSON file")->required();
    loops->add_option("--t0", l_t0, "insertion parameter as a fraction of the domain");
    loops->add_option("--count", l_count, "loops added at t0");
    loops->add_option("--rho", l_rho, "loop radius");
    loops->add_option("--eps", l_eps, "window half-width as a fraction of the domain");
    loops->add_option("--spread", l_spread, "spread n loops along the curve instead");
    loops->callback([&] {
        run = [&] {
            const AdmissibleCurve c = load_curve(input);
            const AdmissibleCurve r = l_spread > 0
                                          ? spread_loops(c, l_spread, l_rho)
                                          : add_loops(c, l_t0 * c.domain(), l_count, l_rho, l_eps * c.domain());
            Output out(common.output);
            out.line(curve_to_json(r));
            const double margin = curvature_margin(r, c.bounds);
            out.line({{"report",
                       {{"parity_before", lift_parity(c)},
                        {"parity_after", lift_parity(r)},
                        {"tot_before", total_curvature(c)},
                        {"tot_after", total_curvature(r)},
                        {"min_margin", margin},
                        {"closure_defect", closure_defect(r)},
                        {"pass", margin > 0 && r.closed}}}});
            if (!(margin > 0 && r.closed)) status = 1;
        };
    });

    // shrink
    auto* shrink = app.add_subcommand("shrink", "shrink a condensed curve to a circle");
    int s_steps = 65;
    shrink->add_option("input", input, "curve JSON file")->required();
    shrink->add_option("--steps", s_steps, "frames");
    shrink->callback([&] {
        run = [&] {
            const ToleranceProfile tol = load_tolerances(common);
            Output out(common.output);
            emit_path(out, shrink_condensed(load_curve(input), s_steps, tol), tol, status);
        };
    });

    // graft
    auto* graft = app.add_subcommand("graft", "grafting steps as a JSONL chain");
    std::string mode = "auto";
    double gr_step = -1, gr_budget = 50;
    bool gr_curves = false;
    graft->add_option("input", input, "curve JSON file")->required();
    graft->add_option("--mode", mode, "antipodal | simplex | auto")
        ->check(CLI::IsMember({"antipodal", "simplex", "auto"}));
    graft->add_option("--step", gr_step, "turning length per step (default from the tolerance profile)");
    graft->add_option("--budget", gr_budget, "largest accumulated turning length");
    graft->add_flag("--curves", gr_curves, "include each grafted curve");
    graft->callback([&] {
        run = [&] {
            const ToleranceProfile tol = load_tolerances(common);
            const double step = gr_step > 0 ? gr_step : tol.graft_step;
            const AdmissibleCurve c = load_curve(input);
            Output out(common.output);
            auto emit = [&](int i, const GraftRecord& rec, double tot, const AdmissibleCurve* curve) {
                Json line = {{"step", i}, {"tot", tot}, {"record", graft_record_to_json(rec)}};
                if (curve) line["curve"] = curve_to_json(*curve);
                out.line(line);
            };
            if (mode != "auto") {
                GraftResult r = mode == "antipodal" ? graft_antipodal_circles(c, step, tol)
                                                    : graft_simplex_step(c, step, tol);
                r.record.base_id = "input";
                r.record.result_id = "step-1";
                const double tot = total_curvature(r.curve);
                emit(1, r.record, tot, gr_curves ? &r.curve : nullptr);
                const StatusTag tag = condensed_status(reduce_to_k0(r.curve).curve, tol).tag;
                out.line({{"status", status_name(tag)},
                          {"accumulated", r.record.phi.s1 - r.record.phi.s0},
                          {"tot_before", total_curvature(c)},
                          {"tot_after", tot}});
                return;
            }
            const GraftChain ch = graft_chain(c, step, gr_budget, tol);
            for (size_t i = 0; i < ch.records.size(); ++i) {
                GraftRecord rec = ch.records[i];
                rec.base_id = i == 0 ? "input" : "step-" + std::to_string(i);
                rec.result_id = "step-" + std::to_string(i + 1);
                emit(static_cast<int>(i + 1), rec, ch.tot[i + 1], nullptr);
            }
            Json summary = {{"status", status_name(ch.status)},
                            {"accumulated", ch.accumulated},
                            {"steps", ch.records.size()},
                            {"tot_before", ch.tot.front()},
                            {"tot_after", ch.tot.back()},
                            {"budget_exhausted", ch.budget_exhausted},
                            {"bound_violated", ch.bound_violated}};
            summary["bound"] = std::isfinite(ch.bound) ? Json(ch.bound) : Json(nullptr);
            if (gr_curves) summary["curve"] = curve_to_json(ch.curve);
            out.line(summary);
            if (ch.budget_exhausted || ch.bound_violated) status = 1;
        };
    });

    // bands
    auto* bands = app.add_subcommand("bands", "good band of a condensed curve with kappa0 < 0");
    std::string format = "csv", central_out, collapse_out;
    int bd_nodes = 0, bd_half = 8;
    double bd_ext = 0;
    bands->add_option("input", input, "curve JSON file")->required();
    bands->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    bands->add_option("--nodes", bd_nodes, "meridians (default from the tolerance profile)");
    bands->add_option("--extension", bd_ext, "fiber extension e of the regular band");
    bands->add_option("--central", central_out, "write the central curve JSON here");
    bands->add_option("--collapse", collapse_out, "write the circle-collapse path JSONL here");
    bands->add_option("--half", bd_half, "collapse frames per half");
    bands->callback([&] {
        run = [&] {
            const ToleranceProfile tol = load_tolerances(common);
            const AdmissibleCurve c = load_curve(input);
            const int K = bd_nodes > 0 ? bd_nodes : tol.band_nodes;
            const CondensedBand cb = band_from_condensed(c, bd_ext, K, tol);
            Output out(common.output);
            if (format == "csv") {
                out.out() << band_profile_csv(cb.band);
            } else {
                Json j = band_to_json(cb.band);
                j["extension"] = cb.extension;
                j["distance_min"] = cb.distances.min;
                j["distance_max"] = cb.distances.max;
                j["good"] = is_good(cb.band, tol.band);
                j["axis"] = {cb.frame.e3.x(), cb.frame.e3.y(), cb.frame.e3.z()};
                out.line(j);
            }
            if (!central_out.empty()) {
                const CentralCurve cc = central_curve(cb.band, cb.frame);
                Output co(central_out);
                Json j = curve_to_json(cc.curve);
                co.line({{"curve", j},
                         {"rho_min", cc.rho_min},
                         {"rho_max", cc.rho_max},
                         {"margin", cc.margin},
                         {"lipschitz", cc.lipschitz},
                         {"track_clearance", cc.track_clearance}});
            }
            if (!collapse_out.empty()) {
                Output po(collapse_out);
                emit_path(po, collapse_condensed(c, bd_half, std::min(K, 512), tol), tol, status);
            }
        };
    });

    // validate
    auto* validate = app.add_subcommand("validate", "validate a JSONL homotopy path");
    std::string v_k1, v_k2;
    validate->add_option("input", input, "JSONL path file")->required();
    validate->add_option("--kappa1", v_k1, "override the lower bound");
    validate->add_option("--kappa2", v_k2, "override the upper bound");
    validate->callback([&] {
        run = [&] {
            const ToleranceProfile tol = load_tolerances(common);
            HomotopyPath path;
            path.curves = load_path(input);
            path.provenance = "custom";
            path.bounds = path.curves.front().bounds;
            if (!v_k1.empty() || !v_k2.empty()) {
                const double k1 = v_k1.empty() ? path.bounds.kappa1 : parse_extended(v_k1);
                const double k2 = v_k2.empty() ? path.bounds.kappa2 : parse_extended(v_k2);
                path.bounds = CurvatureBounds::make(k1, k2);
            }
            for (size_t i = 0; i < path.curves.size(); ++i)
                path.s.push_back(path.curves.size() > 1 ? static_cast<double>(i) / (path.curves.size() - 1) : 0.0);
            const ValidationReport r = validate_path(path, path.bounds, tol);
            Output out(common.output);
            Json report = report_to_json(r);
            report["frames"] = path.curves.size();
            out.line(report);
            if (!r.pass) status = 1;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        run();
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return e.code() == ErrorCode::InvalidInput ? 2 : 1;
    } catch (const Json::exception& e) {
        std::cerr << "InvalidInput: " << e.what() << '\n';
        return 2;
    }
    return status;
}
