#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "plnav/frames.hpp"
#include "plnav/nav_state.hpp"

namespace plnav {

struct ImuSample {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();   // rad/s, body
  Vec3 accel = Vec3::Zero();  // specific force, m/s^2, body
};

struct ImuNoiseParams {
  double gyro_noise_density = 1.0e-3;  // rad/s/sqrt(Hz)
  double accel_noise_density = 1.0e-2; // m/s^2/sqrt(Hz)
  double gyro_bias_walk = 1.0e-5;      // rad/s^2/sqrt(Hz)
  double accel_bias_walk = 1.0e-3;     // m/s^3/sqrt(Hz)
  double sample_rate = 200.0;          // Hz

  /// Throws NavError(kInvalidInput) unless every field is positive.
  void validate() const;
};

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

/// Accumulated motion between two epochs, expressed in the body frame of the
/// first epoch, with its noise covariance and first-order bias Jacobians.
/// Covariance ordering is (rotation, velocity, position).
struct PreintegratedImu {
  Rotation delta_R = Rotation::Identity();
  Vec3 delta_v = Vec3::Zero();
  Vec3 delta_p = Vec3::Zero();
  Mat9 covariance = Mat9::Zero();
  Mat3 J_dR_dbg = Mat3::Zero();
  Mat3 J_dv_dba = Mat3::Zero();
  Mat3 J_dv_dbg = Mat3::Zero();
  Mat3 J_dp_dba = Mat3::Zero();
  Mat3 J_dp_dbg = Mat3::Zero();
  double dt_total = 0.0;
  ImuBias bias_lin;
  int num_samples = 0;

  static PreintegratedImu start(const ImuBias& bias_lin);
};

/// One zero-order-hold step with the sample held over dt.
PreintegratedImu integrate_sample(const PreintegratedImu& acc, const ImuSample& sample, double dt,
                                  const ImuNoiseParams& noise);

/// Preintegrates the samples with t in (t_start, t_end]. Sample k covers the
/// interval (t_{k-1}, t_k]; the first one starts at t_start. A trailing gap up
/// to t_end is held with the last sample. Throws NavError(kImuGap) when any
/// covered interval exceeds twice the nominal sample period.
PreintegratedImu preintegrate(std::span<const ImuSample> samples, double t_start, double t_end,
                              const ImuBias& bias_lin, const ImuNoiseParams& noise);

struct CorrectedDeltas {
  Rotation delta_R;
  Vec3 delta_v;
  Vec3 delta_p;
  // Set when the bias moved further than the first-order model is trusted
  // (0.05 rad/s gyro or 0.5 m/s^2 accel).
  bool large_bias_change = false;
};

CorrectedDeltas bias_corrected_deltas(const PreintegratedImu& pre, const ImuBias& bias);

NavState predict_state(const NavState& state_i, const PreintegratedImu& pre, const Vec3& gravity);

struct ImuResidual {
  Vec3 r_dR = Vec3::Zero();
  Vec3 r_dv = Vec3::Zero();
  Vec3 r_dp = Vec3::Zero();

  Vec9 stacked() const;
};

ImuResidual imu_residual(const NavState& state_i, const NavState& state_j, const PreintegratedImu& pre,
                         const Vec3& gravity);

/// d(residual)/d(tangent) for both states, columns in StateDelta layout.
/// The residual does not depend on state_j's biases; those columns are zero.
struct ImuResidualJacobians {
  Eigen::Matrix<double, 9, 15> wrt_i = Eigen::Matrix<double, 9, 15>::Zero();
  Eigen::Matrix<double, 9, 15> wrt_j = Eigen::Matrix<double, 9, 15>::Zero();
};

ImuResidualJacobians residual_jacobians(const NavState& state_i, const NavState& state_j,
                                        const PreintegratedImu& pre, const Vec3& gravity);

}  // namespace plnav
