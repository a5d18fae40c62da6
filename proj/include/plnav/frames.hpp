#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace plnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Element of SO(3) stored as a 3x3 matrix. Callers keep RᵀR = I and
/// det R = +1; see is_rotation() and orthonormalize().
using Rotation = Eigen::Matrix3d;

namespace wgs84 {
inline constexpr double kSemiMajor = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kSemiMinor = kSemiMajor * (1.0 - kFlattening);
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);
// Somigliana normal gravity on the ellipsoid.
inline constexpr double kGravityEquator = 9.7803253359;
inline constexpr double kGravityPole = 9.8321849379;
// Linear free-air gradient, (m/s^2)/m.
inline constexpr double kFreeAirGradient = 3.086e-6;
}  // namespace wgs84

struct GeodeticCoord {
  double latitude = 0.0;   // rad
  double longitude = 0.0;  // rad, (-pi, pi]
  double height = 0.0;     // m above the ellipsoid
};

Mat3 skew(const Vec3& v);

/// Rodrigues exponential. Below |theta| = 1e-8 the coefficients switch to
/// their second-order Taylor expansions.
Rotation so3_exp(const Vec3& theta);

/// Principal-branch logarithm, |result| <= pi.
///
/// Near a half turn the axis is recovered from the symmetric part of R,
/// using the column with the largest diagonal entry of (S - cos(theta) I).
/// Its sign follows the antisymmetric part when that part is non-zero; for
/// an exact half turn the component along that largest diagonal is
/// positive, so log(Rz(pi)) = (0, 0, pi).
Vec3 so3_log(const Rotation& R);

/// Right Jacobian of SO(3) and its inverse.
Mat3 so3_right_jacobian(const Vec3& theta);
Mat3 so3_right_jacobian_inverse(const Vec3& theta);

bool is_rotation(const Mat3& R, double tol = 1e-9);

/// Nearest rotation in the Frobenius sense (SVD projection).
Rotation orthonormalize(const Mat3& M);

Rotation rotation_from_quaternion(double qw, double qx, double qy, double qz);
Eigen::Quaterniond quaternion_from_rotation(const Rotation& R);

Vec3 geodetic_to_ecef(const GeodeticCoord& g);

/// Iterative inverse; throws NavError(kInvalidInput) for |p| <= 1e5 m.
GeodeticCoord ecef_to_geodetic(const Vec3& p);

/// Rows are the East, North and Up axes in ECEF, so that
/// enu = enu_rotation(origin) * (p - p_origin).
Rotation enu_rotation(const GeodeticCoord& origin);

/// Somigliana normal gravity magnitude with a linear free-air correction.
double normal_gravity(double latitude, double height);

/// Normal gravity vector in ECEF, pointing along the ellipsoidal down axis.
/// Valid for |p| in [6.2e6, 7.0e6] m, otherwise throws.
Vec3 gravity_ecef(const Vec3& p);

/// Antenna point from body position: p_body + R * lever.
Vec3 apply_lever_arm(const Rotation& R, const Vec3& p_body, const Vec3& lever);

/// Body-to-ECEF rotation for a forward-left-up body frame with the given
/// roll/pitch/yaw relative to the local ENU frame (yaw counter-clockwise
/// from East, Z-Y-X order).
Rotation body_to_ecef(const GeodeticCoord& at, double roll, double pitch, double yaw);

/// Inverse of body_to_ecef: (roll, pitch, yaw) of R relative to ENU at `at`.
Vec3 roll_pitch_yaw(const GeodeticCoord& at, const Rotation& R);

}  // namespace plnav
