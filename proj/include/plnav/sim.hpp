#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "plnav/frames.hpp"
#include "plnav/imu_preintegration.hpp"
#include "plnav/nav_state.hpp"
#include "plnav/pseudorange.hpp"

namespace plnav {

struct CircleTrajectory {
  double radius = 20.0;  // m
  double speed = 4.0;    // m/s
};

/// Gerono lemniscate: east = scale sin(wt), north = scale/2 sin(2wt).
struct FigureEightTrajectory {
  double scale = 30.0;   // m
  double period = 40.0;  // s
};

struct StraightLineTrajectory {
  double speed = 5.0;    // m/s
  double heading = 0.0;  // rad counter-clockwise from East
};

using TrajectorySpec = std::variant<CircleTrajectory, FigureEightTrajectory, StraightLineTrajectory>;

struct SatelliteSpec {
  std::string id;
  double azimuth = 0.0;    // rad clockwise from North
  double elevation = 1.0;  // rad
  double range = 2.2e7;    // m from the scenario origin
  double clock_offset = 0.0;
};

struct PseudoliteSpec {
  std::string id;
  Vec3 enu = Vec3::Zero();  // m relative to the scenario origin
  double clock_offset = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration = 80.0;       // s
  double gnss_epoch_rate = 1.0; // Hz
  double imu_rate = 200.0;      // Hz
  GeodeticCoord origin;
  TrajectorySpec trajectory = CircleTrajectory{};
  std::vector<SatelliteSpec> satellites;
  std::vector<PseudoliteSpec> pseudolites;
  Vec3 base_enu = Vec3::Zero();
  Vec3 lever_arm{0.0, 0.0, -0.1249};
  // Per-receiver pseudorange error: white part plus a first-order
  // Gauss-Markov part with the given steady-state sigma and time constant.
  double pr_sigma = 1.0;
  double pr_bias_sigma = 0.0;
  double pr_bias_tau = 30.0;
  double clock_walk_sigma = 0.1;  // m/sqrt(s), rover and base receiver clocks
  double elevation_mask = 0.0872664626;  // rad (5 deg)
  ImuNoiseParams noise;          // sample_rate tracks imu_rate
  ImuBias initial_bias;
  // When false every random draw is zero; declared sigmas stay as the
  // estimator's weights.
  bool inject_noise = true;

  /// Throws NavError(kConfig) naming the offending field.
  void validate() const;

  /// Declared 1-sigma of one receiver's pseudorange.
  double pseudorange_sigma() const;
  ImuNoiseParams imu_noise() const;
  int num_epochs() const;
  double epoch_time(int index) const;
};

/// Analytic vehicle motion in the origin's ENU tangent plane with a
/// forward-left-up body frame, plus samples at imu_rate over [0, duration].
class GroundTruth {
 public:
  explicit GroundTruth(const ScenarioConfig& cfg);

  Vec3 position(double t) const;      // ECEF
  Vec3 velocity(double t) const;      // ECEF
  Vec3 acceleration(double t) const;  // ECEF
  Rotation rotation(double t) const;  // body to ECEF
  Vec3 angular_rate(double t) const;  // body frame
  NavState state(double t) const;

  Vec3 position_enu(double t) const;
  double yaw(double t) const;

  const std::vector<NavState>& samples() const { return samples_; }
  double start_time() const { return 0.0; }
  double end_time() const { return duration_; }

  /// Linear interpolation between samples; throws outside the span.
  Vec3 interpolate_position(double t) const;
  Rotation nearest_rotation(double t) const;

 private:
  struct Kinematics {
    Vec3 p, v, a;  // ENU
    double yaw = 0.0;
    double yaw_rate = 0.0;
  };
  Kinematics kinematics(double t) const;

  TrajectorySpec trajectory_;
  GeodeticCoord origin_;
  Vec3 origin_ecef_;
  Rotation ecef_to_enu_;
  double duration_;
  double sample_period_;
  std::vector<NavState> samples_;
};

GroundTruth generate_trajectory(const ScenarioConfig& cfg);

/// IMU sample k is stamped t_k = k / imu_rate (k = 1..N) and holds the
/// angular rate and specific force at the middle of (t_{k-1}, t_k], plus
/// biases and noise. Specific force is resolved in the body frame at t_{k-1}.
std::vector<ImuSample> derive_imu_measurements(const GroundTruth& gt, const ScenarioConfig& cfg);

struct EpochObservations {
  double epoch = 0.0;
  std::vector<PseudorangeObs> rover;
  std::vector<PseudorangeObs> base;
  std::vector<TransmitterState> transmitters;
};

/// Sequential pseudorange generator. Random streams are keyed by
/// (seed, stream, transmitter id) so adding a pseudolite leaves the draws
/// of every other transmitter untouched.
class PseudorangeGenerator {
 public:
  PseudorangeGenerator(const GroundTruth& gt, const ScenarioConfig& cfg);

  /// Epochs must be requested in increasing order.
  EpochObservations generate(double epoch);

  const std::vector<std::string>& notices() const { return notices_; }
  const Vec3& base_position() const { return base_position_; }
  const std::vector<TransmitterState>& transmitters() const { return transmitters_; }

 private:
  struct ErrorProcess {
    std::mt19937_64 rng;
    double correlated = 0.0;
    bool started = false;
  };
  double draw_error(ErrorProcess& process, double dt);

  const GroundTruth& gt_;
  ScenarioConfig cfg_;
  Vec3 base_position_;
  std::vector<TransmitterState> transmitters_;
  std::vector<ErrorProcess> rover_errors_;
  std::vector<ErrorProcess> base_errors_;
  std::mt19937_64 clock_rng_;
  double rover_clock_ = 0.0;
  double base_clock_ = 0.0;
  double last_epoch_ = 0.0;
  bool first_ = true;
  std::vector<std::string> notices_;
};

struct SimulatedDataset {
  ScenarioConfig config;
  GroundTruth truth;
  std::vector<ImuSample> imu;
  std::vector<EpochObservations> epochs;
  Vec3 base_position = Vec3::Zero();
  std::vector<std::string> notices;
};

SimulatedDataset simulate(const ScenarioConfig& cfg);

/// The four signal sets (GPS only, GPS + two pseudolites, GPS + PL01,
/// GPS + PL02) sharing one seed, trajectory and satellite geometry.
std::vector<ScenarioConfig> default_paper_scenarios(std::uint64_t seed = 1);

/// Stable 64-bit FNV-1a, used to key random streams by name.
std::uint64_t stable_hash(std::string_view s);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub = 0);

}  // namespace plnav
