#include "plnav/frames.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "plnav/error.hpp"

namespace plnav {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Rotation so3_exp(const Vec3& theta) {
  const double angle_sq = theta.squaredNorm();
  const double angle = std::sqrt(angle_sq);
  double a = 0.0;
  double b = 0.0;
  if (angle < 1e-8) {
    a = 1.0 - angle_sq / 6.0;
    b = 0.5 - angle_sq / 24.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / angle_sq;
  }
  const Mat3 K = skew(theta);
  return Mat3::Identity() + a * K + b * K * K;
}

Vec3 so3_log(const Rotation& R) {
  const Vec3 w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double sin_angle = 0.5 * w.norm();
  const double cos_angle = 0.5 * (R.trace() - 1.0);
  const double angle = std::atan2(sin_angle, cos_angle);

  if (cos_angle > -0.9) {
    if (angle < 1e-6) {
      // angle / sin(angle) ~ 1 + angle^2 / 6
      return 0.5 * (1.0 + angle * angle / 6.0) * w;
    }
    return (angle / (2.0 * sin_angle)) * w;
  }

  // Half-turn neighbourhood: axis from the symmetric part.
  const Mat3 S = 0.5 * (R + R.transpose());
  const Mat3 M = (S - cos_angle * Mat3::Identity()) / (1.0 - cos_angle);
  Eigen::Index k = 0;
  M.diagonal().maxCoeff(&k);
  Vec3 axis = M.col(k) / std::sqrt(std::max(M(k, k), 1e-300));
  axis.normalize();
  const double alignment = axis.dot(w);
  if (std::abs(alignment) > 1e-14 && alignment < 0.0) axis = -axis;
  return angle * axis;
}

Mat3 so3_right_jacobian(const Vec3& theta) {
  const double angle_sq = theta.squaredNorm();
  const double angle = std::sqrt(angle_sq);
  const Mat3 K = skew(theta);
  double a = 0.0;
  double b = 0.0;
  if (angle < 1e-4) {
    a = 0.5 - angle_sq / 24.0;
    b = 1.0 / 6.0 - angle_sq / 120.0;
  } else {
    a = (1.0 - std::cos(angle)) / angle_sq;
    b = (angle - std::sin(angle)) / (angle_sq * angle);
  }
  return Mat3::Identity() - a * K + b * K * K;
}

Mat3 so3_right_jacobian_inverse(const Vec3& theta) {
  const double angle_sq = theta.squaredNorm();
  const double angle = std::sqrt(angle_sq);
  const Mat3 K = skew(theta);
  double c = 0.0;
  if (angle < 1e-4) {
    c = 1.0 / 12.0 + angle_sq / 720.0;
  } else {
    c = 1.0 / angle_sq - (1.0 + std::cos(angle)) / (2.0 * angle * std::sin(angle));
  }
  return Mat3::Identity() + 0.5 * K + c * K * K;
}

bool is_rotation(const Mat3& R, double tol) {
  if (!R.allFinite()) return false;
  if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

Rotation orthonormalize(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Mat3 U = svd.matrixU();
    U.col(2) *= -1.0;
    R = U * svd.matrixV().transpose();
  }
  return R;
}

Rotation rotation_from_quaternion(double qw, double qx, double qy, double qz) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  q.normalize();
  return q.toRotationMatrix();
}

Eigen::Quaterniond quaternion_from_rotation(const Rotation& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  // Canonical hemisphere keeps files deterministic.
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

Vec3 geodetic_to_ecef(const GeodeticCoord& g) {
  const double sin_lat = std::sin(g.latitude);
  const double cos_lat = std::cos(g.latitude);
  const double n = wgs84::kSemiMajor / std::sqrt(1.0 - wgs84::kEccentricitySq * sin_lat * sin_lat);
  return {(n + g.height) * cos_lat * std::cos(g.longitude),
          (n + g.height) * cos_lat * std::sin(g.longitude),
          (n * (1.0 - wgs84::kEccentricitySq) + g.height) * sin_lat};
}

GeodeticCoord ecef_to_geodetic(const Vec3& p) {
  if (!p.allFinite() || p.norm() <= 1e5) {
    throw NavError(ErrorCode::kInvalidInput, "ecef_to_geodetic: point too close to Earth center");
  }
  constexpr double e2 = wgs84::kEccentricitySq;
  constexpr double a = wgs84::kSemiMajor;
  const double rho = std::hypot(p.x(), p.y());

  GeodeticCoord g;
  g.longitude = std::atan2(p.y(), p.x());
  if (g.longitude <= -std::numbers::pi) g.longitude = std::numbers::pi;

  double lat = std::atan2(p.z(), rho * (1.0 - e2));
  for (int i = 0; i < 30; ++i) {
    const double s = std::sin(lat);
    const double n = a / std::sqrt(1.0 - e2 * s * s);
    const double next = std::atan2(p.z() + e2 * n * s, rho);
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) break;
  }
  const double s = std::sin(lat);
  const double n = a / std::sqrt(1.0 - e2 * s * s);
  g.latitude = lat;
  g.height = rho * std::cos(lat) + p.z() * s - a * a / n;
  return g;
}

Rotation enu_rotation(const GeodeticCoord& origin) {
  const double sl = std::sin(origin.latitude);
  const double cl = std::cos(origin.latitude);
  const double so = std::sin(origin.longitude);
  const double co = std::cos(origin.longitude);
  Rotation C;
  C << -so, co, 0.0,
       -sl * co, -sl * so, cl,
       cl * co, cl * so, sl;
  return C;
}

double normal_gravity(double latitude, double height) {
  using namespace wgs84;
  const double k = (kSemiMinor * kGravityPole) / (kSemiMajor * kGravityEquator) - 1.0;
  const double s2 = std::sin(latitude) * std::sin(latitude);
  const double surface = kGravityEquator * (1.0 + k * s2) / std::sqrt(1.0 - kEccentricitySq * s2);
  return surface - kFreeAirGradient * height;
}

Vec3 gravity_ecef(const Vec3& p) {
  const double r = p.norm();
  if (!(r >= 6.2e6 && r <= 7.0e6)) {
    throw NavError(ErrorCode::kInvalidInput, "gravity_ecef: radius outside [6.2e6, 7.0e6] m");
  }
  const GeodeticCoord g = ecef_to_geodetic(p);
  const Vec3 up = enu_rotation(g).row(2).transpose();
  return -normal_gravity(g.latitude, g.height) * up;
}

Vec3 apply_lever_arm(const Rotation& R, const Vec3& p_body, const Vec3& lever) {
  return p_body + R * lever;
}

Rotation body_to_ecef(const GeodeticCoord& at, double roll, double pitch, double yaw) {
  const Mat3 local = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                      Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                      Eigen::AngleAxisd(roll, Vec3::UnitX())).toRotationMatrix();
  return enu_rotation(at).transpose() * local;
}

Vec3 roll_pitch_yaw(const GeodeticCoord& at, const Rotation& R) {
  const Mat3 C = enu_rotation(at) * R;
  const double pitch = -std::asin(std::clamp(C(2, 0), -1.0, 1.0));
  return {std::atan2(C(2, 1), C(2, 2)), pitch, std::atan2(C(1, 0), C(0, 0))};
}

}  // namespace plnav
