#pragma once

#include "spherecurve/band.hpp"
#include "spherecurve/sphere.hpp"

#include <optional>
#include <vector>

namespace spherecurve {

// n = floor(pi / (rho1 - rho2)) + 1, snapping quotients within 1e-12 of an integer.
int component_count(const CurvatureBounds& b);

struct ReducedCurve {
    AdmissibleCurve curve;  // bounds (kappa0, +inf)
    double kappa0 = 0;
};
ReducedCurve reduce_to_k0(const AdmissibleCurve& c);

enum class StatusTag { Condensed, Diffuse, Both, Neither, Borderline };
const char* status_name(StatusTag tag);

struct AntipodalWitness {
    double t1 = 0, theta1 = 0, t2 = 0, theta2 = 0;
    double defect = kInf;  // |C(t1,theta1) + C(t2,theta2)|
};

struct CondensedStatus {
    StatusTag tag = StatusTag::Neither;
    bool condensed = false;
    bool diffuse = false;
    bool borderline = false;
    double margin = 0;       // max over unit h of min <p,h> on the caustic band
    Vec3 h = Vec3::Zero();   // containing-hemisphere witness (condensed) or best direction
    AntipodalWitness antipodal;
};

// Sampled caustic band of a curve in (kappa0, +inf) form.
struct CausticCloud {
    AdmissibleCurve curve;          // densified copy of the input
    BandGrid grid;                  // C(t_i, theta_j), theta in [0, rho0]
    std::vector<Vec3> points;       // grid points; the last column is the caustic
    double spacing = 0;             // largest distance between grid neighbours
};
CausticCloud caustic_cloud(const AdmissibleCurve& reduced, const ToleranceProfile& tol = {});

CondensedStatus is_condensed(const AdmissibleCurve& reduced, const ToleranceProfile& tol = {});
CondensedStatus is_diffuse(const AdmissibleCurve& reduced, const ToleranceProfile& tol = {});
CondensedStatus condensed_status(const AdmissibleCurve& reduced, const ToleranceProfile& tol = {});

// Antipodal caustic pair with theta restricted to [lo, hi]; refined by Gauss-Newton.
AntipodalWitness find_antipodal_pair(const CausticCloud& cloud, double theta_lo, double theta_hi,
                                     const ToleranceProfile& tol = {});

// Normalized centroid of the dual set {h : <p,h> >= 0 for all p}.
Vec3 hemisphere_barycenter(const std::vector<Vec3>& cloud, const ToleranceProfile& tol = {});

// -(total turning of the projected tangent)/2pi, projecting from -h.
double winding_about(const AdmissibleCurve& c, const Vec3& h);
int rotation_number_condensed(const AdmissibleCurve& reduced, const ToleranceProfile& tol = {},
                              Vec3* h_used = nullptr);
int rotation_number_nondiffuse(const AdmissibleCurve& reduced, const ToleranceProfile& tol = {});

struct ComponentLabel {
    int n = 0;
    int j = 0;
    bool condensed = false;
    std::optional<int> nu;
    int parity = 1;
    bool borderline = false;
    CondensedStatus status;
};
ComponentLabel classify_component(const AdmissibleCurve& c, const ToleranceProfile& tol = {});

// Upper bound 4 pi nu / cos^2(rho0/2) on the total curvature of non-diffuse curves.
double total_curvature_bound(double rho0, int nu);

// sum_i arcsin(cos(rho0) sin(lambda_i)) - (pi - 2 rho0); DomainError outside
// lambda_i in [0, pi/2], sum = pi, rho0 in (0, pi/2].
double equatorial_inequality_slack(double rho0, double l2, double l4, double l6);
bool equatorial_inequality_check(double rho0, double l2, double l4, double l6);

}  // namespace spherecurve
