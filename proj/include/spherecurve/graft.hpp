#pragma once

#include "spherecurve/classify.hpp"

#include <string>
#include <vector>

namespace spherecurve {

// phi(t) = t + sum_{x < t, x in X+} d+(x) + sum_{x <= t, x in X-} d-(x) on [0, s0].
struct GraftingFunction {
    double s0 = 0, s1 = 0;
    std::vector<double> x_plus, d_plus, x_minus, d_minus;

    static GraftingFunction identity(double T);
    double operator()(double t) const;
    double right_limit(double t) const;
    double left_limit(double t) const;
    // Sorted insertion points with positive weights and s1 = s0 + total weight.
    bool valid(double tol = 1e-12) const;
};

GraftingFunction compose_grafting(const GraftingFunction& phi0, const GraftingFunction& phi1);

struct InsertedArc {
    double t = 0;      // location in the base curve's curvature parameter
    double rho = 0;    // radius of curvature of the arc
    double sigma = 0;  // turning length
};

struct GraftRecord {
    std::string base_id, result_id;
    GraftingFunction phi;
    std::vector<InsertedArc> arcs;
    double frame_residual = 0;  // |lifted end frame of result - lifted end frame of base|
    std::vector<double> weights;  // barycentric weights of the simplex graft
};

struct GraftResult {
    AdmissibleCurve curve;  // parametrized by curvature
    GraftRecord record;
};

// Inserts circle arcs into a curve parametrized by curvature.
AdmissibleCurve insert_arcs(const AdmissibleCurve& g, std::vector<InsertedArc> arcs);

// max |Lambda_base(u) - Lambda_result(phi(u))| over base segment midpoints.
double pullback_defect(const AdmissibleCurve& base, const AdmissibleCurve& result, const GraftingFunction& phi);

GraftResult graft_antipodal_circles(const AdmissibleCurve& c, double s, const ToleranceProfile& tol = {});
GraftResult graft_simplex_step(const AdmissibleCurve& c, double s, const ToleranceProfile& tol = {});

struct GraftChain {
    AdmissibleCurve curve;
    StatusTag status = StatusTag::Neither;
    double accumulated = 0;
    double bound = kInf;           // 4 pi nu / cos^2(rho0 / 2) when nu is available
    std::vector<double> tot;       // total curvature after each step, starting with the input
    std::vector<GraftRecord> records;
    bool budget_exhausted = false;
    bool bound_violated = false;
};

// Grafts while the curve is neither condensed nor diffuse; never throws on budget.
GraftChain graft_chain(const AdmissibleCurve& c, double step, double budget, const ToleranceProfile& tol = {});
// Same, throwing BudgetExceeded or BoundViolation.
GraftChain graft_until_resolved(const AdmissibleCurve& c, double step, double budget,
                                const ToleranceProfile& tol = {});

// Loops of radius rho1 spread along a three-petal rose about the north pole that
// reaches just past the equator; bounds (cot rho0, +inf). n = 0 picks the smallest
// power of two keeping the curvature above cot(rho0 - 0.01).
AdmissibleCurve neither_example(double rho0 = 0.4, double rho1 = 0.2, int n = 0, double reach = kPi / 2 + 0.1);

}  // namespace spherecurve
