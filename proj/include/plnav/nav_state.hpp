#pragma once

#include <Eigen/Core>

#include "plnav/frames.hpp"

namespace plnav {

struct ImuBias {
  Vec3 accel = Vec3::Zero();  // m/s^2
  Vec3 gyro = Vec3::Zero();   // rad/s
};

/// Navigation state at one GNSS/PL epoch: body-to-ECEF attitude, ECEF
/// position and velocity of the IMU reference point, and IMU biases.
struct NavState {
  Rotation rotation = Rotation::Identity();
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  ImuBias bias;
  double epoch = 0.0;
};

using Vec15 = Eigen::Matrix<double, 15, 1>;

/// Tangent-space increment. Vector layout (dtheta, dp, dv, dba, dbg) is used
/// for every 15-dimensional Jacobian and covariance in the library.
struct StateDelta {
  Vec3 dtheta = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Vec3 dba = Vec3::Zero();
  Vec3 dbg = Vec3::Zero();

  static StateDelta from_vector(const Vec15& v);
  Vec15 to_vector() const;
};

namespace tangent {
inline constexpr int kRot = 0;
inline constexpr int kPos = 3;
inline constexpr int kVel = 6;
inline constexpr int kBa = 9;
inline constexpr int kBg = 12;
inline constexpr int kDim = 15;
}  // namespace tangent

/// Right-perturbation retraction: R Exp(dtheta); everything else additive.
NavState retract(const NavState& s, const StateDelta& d);

}  // namespace plnav
