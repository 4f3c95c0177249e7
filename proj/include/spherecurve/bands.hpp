#pragma once

#include "spherecurve/homotopy.hpp"

#include <vector>

namespace spherecurve {

// Band on the nu-sheeted cover of the sphere minus the poles, written as the
// cylinder [0, 2 pi nu) x (-pi/2, pi/2) of longitude psi and latitude. Node k sits
// on the meridian psi_k = 2 pi nu k / K; the band is the region between the
// boundary polylines through (psi_k, theta_minus[k]) and (psi_k, theta_plus[k]).
struct AcceptableBand {
    int nu = 1;
    double R = 0;  // width, 0 < R < pi/2
    std::vector<double> theta_plus, theta_minus;

    int nodes() const { return static_cast<int>(theta_plus.size()); }
    double psi(int k) const { return 2 * kPi * nu * k / nodes(); }
    double spacing() const { return 2 * kPi * nu / nodes(); }
};

// Acceptable band whose boundary distances all equal its width.
using GoodBand = AcceptableBand;

struct BandDistances {
    std::vector<double> from_plus;   // d(p, boundary-) for p on boundary+
    std::vector<double> from_minus;  // d(q, boundary+) for q on boundary-
    double min = kInf, max = 0;
};

// Cover distances of boundary nodes to the opposite boundary polyline. Unrolled
// longitude separations beyond pi are out of reach.
BandDistances boundary_distances(const AcceptableBand& band);
bool is_acceptable(const AcceptableBand& band, double tau);
bool is_good(const AcceptableBand& band, double tau);

// Maximal band theta_plus = R, theta_minus = -R, and the symmetric good band +-R/2.
AcceptableBand maximal_band(int nu, double R, int K);
AcceptableBand symmetric_band(int nu, double R, int K);

// Linear interpolation toward the maximal band.
AcceptableBand contract_band(const AcceptableBand& band, double s);

struct Retraction {
    GoodBand band;
    int iterations = 0;
    bool monotone = true;          // theta_plus nonincreasing, theta_minus nondecreasing
    std::vector<double> changes;   // max |theta^{n+1} - theta^n| per iteration
};

// Alternating trims A^{n+1} = {p in A^n : d(p, boundary^n_{(-1)^n}) <= R + 2^-n}
// until both the change and 2^-n drop below tau/4.
Retraction retract_to_good(const AcceptableBand& band, double tau, int max_iterations = 60);

// Orthonormal frame whose third axis is the hemisphere axis, used to place the
// cylinder on the sphere: p = cos(lat) (cos(psi) e1 + sin(psi) e2) + sin(lat) e3.
struct CoverFrame {
    Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY(), e3 = Vec3::UnitZ();
};
Vec3 cover_point(const CoverFrame& f, double psi, double lat);

struct CondensedBand {
    GoodBand band;
    CoverFrame frame;
    double extension = 0;     // fiber range [rho0 - pi - e, e] of the regular band
    BandDistances distances;  // measured boundary-to-boundary distances
};

// Good band spanned by the regular band of a condensed curve with kappa0 < 0
// after reduction, over [rho0 - pi - e, e]; width pi - rho0 + 2e.
CondensedBand band_from_condensed(const AdmissibleCurve& c, double extension = 0, int K = 2048,
                                  const ToleranceProfile& tol = {});

struct CentralCurve {
    AdmissibleCurve curve;        // bounds (-inf, +inf)
    std::vector<Vec3> points;
    double rho_min = kPi, rho_max = 0;
    double margin = 0;            // distance of [rho_min, rho_max] to the ends of [R/2, pi - R/2]
    double lipschitz = 0;         // worst local estimate of the track direction field
    double track_clearance = kInf;  // smallest advance of consecutive track feet, in psi
};

// Locus at distance R/2 from boundary+, one point per meridian, with the tracks
// through each point; TrackCrossing when consecutive tracks swap order.
CentralCurve central_curve(const GoodBand& band, const CoverFrame& frame = {});

// Circle collapse of a condensed curve with kappa0 < 0: regular band, contraction
// to the maximal band and back to the symmetric band through good bands, central
// curves translated back into the curve's space. 2 * half + 1 frames.
HomotopyPath collapse_condensed(const AdmissibleCurve& c, int half = 8, int K = 512,
                                const ToleranceProfile& tol = {});

}  // namespace spherecurve
