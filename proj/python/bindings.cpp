#include "spherecurve/io.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spherecurve;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(dump_json(j)); }

Json from_python(const py::object& o) {
    return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::array_t<double> points(const AdmissibleCurve& c) {
    py::array_t<double> out({c.nodes(), 3});
    auto a = out.mutable_unchecked<2>();
    for (int i = 0; i < c.nodes(); ++i) {
        const Vec3 p = c.point(i);
        for (int k = 0; k < 3; ++k) a(i, k) = p[k];
    }
    return out;
}

py::list curves(const HomotopyPath& p) {
    py::list out;
    for (const AdmissibleCurve& c : p.curves) out.append(c);
    return out;
}

}  // namespace

PYBIND11_MODULE(spherecurve, m) {
    m.doc() = "Closed curves on the 2-sphere with bounded geodesic curvature";
    py::register_exception<Error>(m, "SphereCurveError");

    py::class_<CurvatureBounds>(m, "CurvatureBounds")
        .def(py::init(&CurvatureBounds::make), py::arg("kappa1"), py::arg("kappa2"))
        .def_readonly("kappa1", &CurvatureBounds::kappa1)
        .def_readonly("kappa2", &CurvatureBounds::kappa2)
        .def_readonly("rho1", &CurvatureBounds::rho1)
        .def_readonly("rho2", &CurvatureBounds::rho2)
        .def_property_readonly("rho0", &CurvatureBounds::rho0)
        .def("__repr__", [](const CurvatureBounds& b) { return "CurvatureBounds(" + dump_json(bounds_to_json(b)) + ")"; });

    py::class_<AdmissibleCurve>(m, "Curve")
        .def_readonly("bounds", &AdmissibleCurve::bounds)
        .def_readonly("closed", &AdmissibleCurve::closed)
        .def_readonly("kappa", &AdmissibleCurve::kappa)
        .def_property_readonly("nodes", &AdmissibleCurve::nodes)
        .def_property_readonly("segments", &AdmissibleCurve::segments)
        .def_property_readonly("domain", &AdmissibleCurve::domain)
        .def("points", &points, "Node positions as an (n + 1, 3) array")
        .def("to_json", [](const AdmissibleCurve& c) { return dump_json(curve_to_json(c)); })
        .def_static("from_json", [](const std::string& s) {
            Json j;
            try {
                j = Json::parse(s);
            } catch (const Json::parse_error& e) {
                throw Error(ErrorCode::InvalidInput, e.what());
            }
            return curve_from_json(j);
        });

    m.def("component_count", &component_count, py::arg("bounds"));
    m.def("make_circle", &make_circle, py::arg("rho"), py::arg("k"), py::arg("bounds"), py::arg("n") = 1024);
    m.def("neither_example", &neither_example, py::arg("rho0") = 0.4, py::arg("rho1") = 0.2, py::arg("n") = 32,
          py::arg("reach") = kPi / 2 + 0.1);
    m.def("total_curvature", &total_curvature, py::arg("curve"));
    m.def("length", &length, py::arg("curve"));
    m.def("lift_parity", &lift_parity, py::arg("curve"));
    m.def("closure_defect", &closure_defect, py::arg("curve"));
    m.def("translate", &translate_curve, py::arg("curve"), py::arg("theta"));
    m.def("rotate", [](const AdmissibleCurve& c, std::array<double, 3> axis_angle) {
        return rotate_curve(c, quat_exp(0.5 * Vec3(axis_angle[0], axis_angle[1], axis_angle[2])));
    }, py::arg("curve"), py::arg("axis_angle"));
    m.def("classify", [](const AdmissibleCurve& c) { return to_python(label_to_json(classify_component(c))); },
          py::arg("curve"));
    m.def("with_bounds", &with_bounds, py::arg("curve"), py::arg("bounds"));

    m.def("bending_frame", &bending_frame, py::arg("k"), py::arg("s"), py::arg("kappa1"),
          py::arg("pieces_per_arc") = 16);
    m.def("bend", [](int k, int steps, double kappa1) {
        const HomotopyPath p = bend_k_equator(k, steps, kappa1);
        return py::make_tuple(curves(p), to_python(report_to_json(validate_path(p, p.bounds))));
    }, py::arg("k"), py::arg("steps") = 65, py::arg("kappa1"));
    m.def("shrink", [](const AdmissibleCurve& c, int steps) {
        const HomotopyPath p = shrink_condensed(c, steps);
        return py::make_tuple(curves(p), to_python(report_to_json(validate_path(p, p.bounds))));
    }, py::arg("curve"), py::arg("steps") = 65);
    m.def("add_loops", &add_loops, py::arg("curve"), py::arg("t0"), py::arg("n_loops"), py::arg("rho_small"),
          py::arg("epsilon"));
    m.def("spread_loops", &spread_loops, py::arg("curve"), py::arg("n"), py::arg("rho1"),
          py::arg("samples_per_loop") = 64);

    m.def("graft_antipodal", [](const AdmissibleCurve& c, double s) {
        GraftResult r = graft_antipodal_circles(c, s);
        return py::make_tuple(r.curve, to_python(graft_record_to_json(r.record)));
    }, py::arg("curve"), py::arg("s"));
    m.def("graft_simplex", [](const AdmissibleCurve& c, double s) {
        GraftResult r = graft_simplex_step(c, s);
        return py::make_tuple(r.curve, to_python(graft_record_to_json(r.record)));
    }, py::arg("curve"), py::arg("s"));
    m.def("graft_until_resolved", [](const AdmissibleCurve& c, double step, double budget) {
        const GraftChain ch = graft_until_resolved(c, step, budget);
        py::dict summary;
        summary["status"] = status_name(ch.status);
        summary["accumulated"] = ch.accumulated;
        summary["bound"] = ch.bound;
        summary["tot"] = ch.tot;
        return py::make_tuple(ch.curve, summary);
    }, py::arg("curve"), py::arg("step") = 0.5, py::arg("budget") = 50.0);

    m.def("band_profile", [](const AdmissibleCurve& c, int nodes) {
        return to_python(band_to_json(band_from_condensed(c, 0.0, nodes).band));
    }, py::arg("curve"), py::arg("nodes") = 2048);
    m.def("collapse", [](const AdmissibleCurve& c, int half, int nodes) {
        const HomotopyPath p = collapse_condensed(c, half, nodes);
        return py::make_tuple(curves(p), to_python(report_to_json(validate_path(p, p.bounds))));
    }, py::arg("curve"), py::arg("half") = 8, py::arg("nodes") = 512);

    m.def("tolerance_profile", [](const py::object& overrides) {
        return to_python(tolerance_to_json(overrides.is_none() ? ToleranceProfile{} : tolerance_from_json(from_python(overrides))));
    }, py::arg("overrides") = py::none());
}
