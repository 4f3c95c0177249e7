#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace spherecurve {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorCode {
    DegenerateProjection,
    NotInHull,
    RadiusOutOfBounds,
    AmbiguousParity,
    ThetaOutOfRange,
    EmptyDual,
    NearZeroCentroid,
    WindingResidual,
    NoGapFound,
    CurvatureBoundTooTight,
    ParameterOverlap,
    NotCondensed,
    StageToleranceFailure,
    NonpositiveRotation,
    DomainMismatch,
    NotDiffuse,
    AntipodalDefect,
    NotNonCondensed,
    ContinuationDiverged,
    DegenerateSimplex,
    BudgetExceeded,
    BoundViolation,
    MeridianMiss,
    NonConvergence,
    TrackCrossing,
    DomainError,
    NotClosed,
    InvalidInput,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// All numerical thresholds in one place; passed explicitly where they matter.
struct ToleranceProfile {
    double unit_norm = 1e-12;
    double orthonormal = 1e-10;
    double feasibility = 1e-9;
    double closure = 1e-7;
    double antipodal = 1e-3;
    double member_factor = 2.0;  // membership radius in units of band grid spacing
    double borderline = 1e-4;
    double winding_residual = 0.05;
    double band = 5e-3;
    int band_nodes = 2048;
    int samples = 1024;
    int theta_nodes = 64;
    int path_steps = 65;
    double graft_step = 0.05;
    int newton_iterations = 50;
    double newton_tol = 1e-12;
    int lattice = 4096;
    std::uint64_t seed = 20240611;
};

// Unit quaternion w + xi + yj + zk. Pure quaternions are identified with R^3.
struct Quat {
    double w = 1, x = 0, y = 0, z = 0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
    static Quat pure(const Vec3& v) { return {0.0, v.x(), v.y(), v.z()}; }

    Vec3 vec() const { return {x, y, z}; }
    Quat conj() const { return {w, -x, -y, -z}; }
    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
    Quat operator-() const { return {-w, -x, -y, -z}; }

    Quat operator*(const Quat& b) const {
        return {w * b.w - x * b.x - y * b.y - z * b.z,
                w * b.x + x * b.w + y * b.z - z * b.y,
                w * b.y - x * b.z + y * b.w + z * b.x,
                w * b.z + x * b.y - y * b.x + z * b.w};
    }
};

// exp of the pure quaternion v: cos|v| + sin|v| v/|v|.
Quat quat_exp(const Vec3& v);
Mat3 quat_to_rotation(Quat q);
Quat rotation_to_quat(const Mat3& R);
// Rotates a vector by q: q v q^-1.
Vec3 quat_rotate(const Quat& q, const Vec3& v);

// Skew matrix of w: skew(w) x = w x x.
Mat3 skew(const Vec3& w);

inline double clamp_unit(double c) { return c > 1 ? 1 : (c < -1 ? -1 : c); }
inline double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace spherecurve
