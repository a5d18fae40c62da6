#include "plnav/imu_preintegration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plnav/error.hpp"

namespace plnav {
namespace {

constexpr double kTimeEpsilon = 1e-9;
constexpr double kGyroBiasWarn = 0.05;
constexpr double kAccelBiasWarn = 0.5;

}  // namespace

void ImuNoiseParams::validate() const {
  const bool ok = gyro_noise_density > 0.0 && accel_noise_density > 0.0 && gyro_bias_walk > 0.0 &&
                  accel_bias_walk > 0.0 && sample_rate > 0.0;
  if (!ok) throw NavError(ErrorCode::kInvalidInput, "ImuNoiseParams: all fields must be positive");
}

StateDelta StateDelta::from_vector(const Vec15& v) {
  return {v.segment<3>(tangent::kRot), v.segment<3>(tangent::kPos), v.segment<3>(tangent::kVel),
          v.segment<3>(tangent::kBa), v.segment<3>(tangent::kBg)};
}

Vec15 StateDelta::to_vector() const {
  Vec15 v;
  v << dtheta, dp, dv, dba, dbg;
  return v;
}

NavState retract(const NavState& s, const StateDelta& d) {
  NavState out = s;
  out.rotation = s.rotation * so3_exp(d.dtheta);
  out.position += d.dp;
  out.velocity += d.dv;
  out.bias.accel += d.dba;
  out.bias.gyro += d.dbg;
  return out;
}

PreintegratedImu PreintegratedImu::start(const ImuBias& bias_lin) {
  PreintegratedImu pre;
  pre.bias_lin = bias_lin;
  return pre;
}

PreintegratedImu integrate_sample(const PreintegratedImu& acc, const ImuSample& sample, double dt,
                                  const ImuNoiseParams& noise) {
  if (!(dt > 0.0)) throw NavError(ErrorCode::kInvalidInput, "integrate_sample: dt must be positive");

  const Vec3 omega = sample.gyro - acc.bias_lin.gyro;
  const Vec3 accel = sample.accel - acc.bias_lin.accel;
  const Rotation& dR = acc.delta_R;
  const Rotation step_R = so3_exp(omega * dt);
  const Mat3 step_Jr = so3_right_jacobian(omega * dt);
  const Mat3 accel_skew = skew(accel);
  const double dt2 = dt * dt;

  PreintegratedImu out = acc;

  // Error-state transition for (rotation, velocity, position).
  Mat9 A = Mat9::Identity();
  A.block<3, 3>(0, 0) = step_R.transpose();
  A.block<3, 3>(3, 0) = -dR * accel_skew * dt;
  A.block<3, 3>(6, 0) = -0.5 * dR * accel_skew * dt2;
  A.block<3, 3>(6, 3) = Mat3::Identity() * dt;

  Eigen::Matrix<double, 9, 3> B_gyro = Eigen::Matrix<double, 9, 3>::Zero();
  Eigen::Matrix<double, 9, 3> B_accel = Eigen::Matrix<double, 9, 3>::Zero();
  B_gyro.block<3, 3>(0, 0) = step_Jr * dt;
  B_accel.block<3, 3>(3, 0) = dR * dt;
  B_accel.block<3, 3>(6, 0) = 0.5 * dR * dt2;

  const double gyro_var = noise.gyro_noise_density * noise.gyro_noise_density / dt;
  const double accel_var = noise.accel_noise_density * noise.accel_noise_density / dt;
  Mat9 cov = A * acc.covariance * A.transpose() + gyro_var * B_gyro * B_gyro.transpose() +
             accel_var * B_accel * B_accel.transpose();
  out.covariance = 0.5 * (cov + cov.transpose());

  // Bias Jacobians use the pre-update rotation and J_dR_dbg.
  out.J_dp_dba = acc.J_dp_dba + acc.J_dv_dba * dt - 0.5 * dR * dt2;
  out.J_dp_dbg = acc.J_dp_dbg + acc.J_dv_dbg * dt - 0.5 * dR * accel_skew * acc.J_dR_dbg * dt2;
  out.J_dv_dba = acc.J_dv_dba - dR * dt;
  out.J_dv_dbg = acc.J_dv_dbg - dR * accel_skew * acc.J_dR_dbg * dt;
  out.J_dR_dbg = step_R.transpose() * acc.J_dR_dbg - step_Jr * dt;

  out.delta_p = acc.delta_p + acc.delta_v * dt + 0.5 * dR * accel * dt2;
  out.delta_v = acc.delta_v + dR * accel * dt;
  out.delta_R = dR * step_R;
  out.dt_total = acc.dt_total + dt;
  out.num_samples = acc.num_samples + 1;
  return out;
}

PreintegratedImu preintegrate(std::span<const ImuSample> samples, double t_start, double t_end,
                              const ImuBias& bias_lin, const ImuNoiseParams& noise) {
  if (!(t_end > t_start)) throw NavError(ErrorCode::kInvalidInput, "preintegrate: empty interval");
  const double max_gap = 2.0 / noise.sample_rate + kTimeEpsilon;
  auto gap_error = [&](double from, double to) {
    std::ostringstream os;
    os.precision(12);
    os << "IMU gap (" << from << ", " << to << "] inside span (" << t_start << ", " << t_end << "]";
    return NavError(ErrorCode::kImuGap, os.str());
  };

  auto first = std::partition_point(samples.begin(), samples.end(),
                                    [&](const ImuSample& s) { return s.t <= t_start + kTimeEpsilon; });
  auto last = std::partition_point(first, samples.end(),
                                   [&](const ImuSample& s) { return s.t <= t_end + kTimeEpsilon; });
  if (first == last) throw gap_error(t_start, t_end);

  PreintegratedImu pre = PreintegratedImu::start(bias_lin);
  double t_prev = t_start;
  for (auto it = first; it != last; ++it) {
    const double dt = it->t - t_prev;
    if (dt > max_gap) throw gap_error(t_prev, it->t);
    if (dt > 0.0) pre = integrate_sample(pre, *it, dt, noise);
    t_prev = it->t;
  }
  const double tail = t_end - t_prev;
  if (tail > max_gap) throw gap_error(t_prev, t_end);
  if (tail > kTimeEpsilon) pre = integrate_sample(pre, *(last - 1), tail, noise);
  return pre;
}

CorrectedDeltas bias_corrected_deltas(const PreintegratedImu& pre, const ImuBias& bias) {
  const Vec3 dba = bias.accel - pre.bias_lin.accel;
  const Vec3 dbg = bias.gyro - pre.bias_lin.gyro;
  CorrectedDeltas out;
  out.delta_R = pre.delta_R * so3_exp(pre.J_dR_dbg * dbg);
  out.delta_v = pre.delta_v + pre.J_dv_dba * dba + pre.J_dv_dbg * dbg;
  out.delta_p = pre.delta_p + pre.J_dp_dba * dba + pre.J_dp_dbg * dbg;
  out.large_bias_change = dbg.norm() > kGyroBiasWarn || dba.norm() > kAccelBiasWarn;
  return out;
}

NavState predict_state(const NavState& state_i, const PreintegratedImu& pre, const Vec3& gravity) {
  const CorrectedDeltas d = bias_corrected_deltas(pre, state_i.bias);
  const double dt = pre.dt_total;
  NavState out = state_i;
  out.rotation = state_i.rotation * d.delta_R;
  out.velocity = state_i.velocity + gravity * dt + state_i.rotation * d.delta_v;
  out.position = state_i.position + state_i.velocity * dt + 0.5 * gravity * dt * dt +
                 state_i.rotation * d.delta_p;
  out.epoch = state_i.epoch + dt;
  return out;
}

Vec9 ImuResidual::stacked() const {
  Vec9 v;
  v << r_dR, r_dv, r_dp;
  return v;
}

ImuResidual imu_residual(const NavState& state_i, const NavState& state_j, const PreintegratedImu& pre,
                         const Vec3& gravity) {
  const CorrectedDeltas d = bias_corrected_deltas(pre, state_i.bias);
  const double dt = pre.dt_total;
  const Mat3 Rt = state_i.rotation.transpose();
  ImuResidual r;
  r.r_dR = so3_log(d.delta_R.transpose() * Rt * state_j.rotation);
  r.r_dv = Rt * (state_j.velocity - state_i.velocity - gravity * dt) - d.delta_v;
  r.r_dp = Rt * (state_j.position - state_i.position - state_i.velocity * dt - 0.5 * gravity * dt * dt) -
           d.delta_p;
  return r;
}

ImuResidualJacobians residual_jacobians(const NavState& state_i, const NavState& state_j,
                                        const PreintegratedImu& pre, const Vec3& gravity) {
  using namespace tangent;
  const double dt = pre.dt_total;
  const Mat3 Rt = state_i.rotation.transpose();
  const Vec3 dbg = state_i.bias.gyro - pre.bias_lin.gyro;
  const Vec3 r_dR = imu_residual(state_i, state_j, pre, gravity).r_dR;
  const Mat3 Jr_inv = so3_right_jacobian_inverse(r_dR);

  const Vec3 dv_world = state_j.velocity - state_i.velocity - gravity * dt;
  const Vec3 dp_world = state_j.position - state_i.position - state_i.velocity * dt - 0.5 * gravity * dt * dt;

  ImuResidualJacobians J;
  // Rotation residual rows.
  J.wrt_i.block<3, 3>(0, kRot) = -Jr_inv * state_j.rotation.transpose() * state_i.rotation;
  J.wrt_i.block<3, 3>(0, kBg) =
      -Jr_inv * so3_exp(r_dR).transpose() * so3_right_jacobian(pre.J_dR_dbg * dbg) * pre.J_dR_dbg;
  J.wrt_j.block<3, 3>(0, kRot) = Jr_inv;

  // Velocity residual rows.
  J.wrt_i.block<3, 3>(3, kRot) = skew(Rt * dv_world);
  J.wrt_i.block<3, 3>(3, kVel) = -Rt;
  J.wrt_i.block<3, 3>(3, kBa) = -pre.J_dv_dba;
  J.wrt_i.block<3, 3>(3, kBg) = -pre.J_dv_dbg;
  J.wrt_j.block<3, 3>(3, kVel) = Rt;

  // Position residual rows.
  J.wrt_i.block<3, 3>(6, kRot) = skew(Rt * dp_world);
  J.wrt_i.block<3, 3>(6, kPos) = -Rt;
  J.wrt_i.block<3, 3>(6, kVel) = -Rt * dt;
  J.wrt_i.block<3, 3>(6, kBa) = -pre.J_dp_dba;
  J.wrt_i.block<3, 3>(6, kBg) = -pre.J_dp_dbg;
  J.wrt_j.block<3, 3>(6, kPos) = Rt;
  return J;
}

}  // namespace plnav
