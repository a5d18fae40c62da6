#include "plnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "plnav/error.hpp"

namespace plnav {
namespace {

constexpr std::uint64_t kImuStream = 1;
constexpr std::uint64_t kRoverPrStream = 2;
constexpr std::uint64_t kBasePrStream = 3;
constexpr std::uint64_t kClockStream = 4;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void config_error(const std::string& field, const std::string& constraint) {
  throw NavError(ErrorCode::kConfig, "field '" + field + "': " + constraint);
}

Vec3 satellite_los_enu(double azimuth, double elevation) {
  return {std::cos(elevation) * std::sin(azimuth), std::cos(elevation) * std::cos(azimuth),
          std::sin(elevation)};
}

double gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

}  // namespace

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(sub),
                    static_cast<std::uint32_t>(sub >> 32)};
  return std::mt19937_64(seq);
}

void ScenarioConfig::validate() const {
  if (name.empty()) config_error("name", "must be non-empty");
  if (!(duration > 0.0)) config_error("duration", "must be > 0");
  if (!(gnss_epoch_rate > 0.0)) config_error("gnss_epoch_rate", "must be > 0");
  if (!(imu_rate > 0.0)) config_error("imu_rate", "must be > 0");
  if (!(imu_rate >= gnss_epoch_rate)) config_error("imu_rate", "must be >= gnss_epoch_rate");
  if (std::abs(origin.latitude) > std::numbers::pi / 2) config_error("origin.latitude", "must be in [-pi/2, pi/2]");
  if (!(origin.longitude > -std::numbers::pi && origin.longitude <= std::numbers::pi)) {
    config_error("origin.longitude", "must be in (-pi, pi]");
  }
  std::visit(Overloaded{[](const CircleTrajectory& c) {
                          if (!(c.radius > 0.0)) config_error("trajectory.radius", "must be > 0");
                          if (!(c.speed > 0.0)) config_error("trajectory.speed", "must be > 0 (yaw follows heading)");
                        },
                        [](const FigureEightTrajectory& f) {
                          if (!(f.scale > 0.0)) config_error("trajectory.scale", "must be > 0");
                          if (!(f.period > 0.0)) config_error("trajectory.period", "must be > 0");
                        },
                        [](const StraightLineTrajectory& s) {
                          if (!(s.speed > 0.0)) config_error("trajectory.speed", "must be > 0 (yaw follows heading)");
                        }},
             trajectory);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < satellites.size(); ++i) {
    const auto& s = satellites[i];
    const std::string f = "satellites[" + std::to_string(i) + "]";
    if (s.id.empty()) config_error(f + ".id", "must be non-empty");
    if (!(s.elevation > 0.0 && s.elevation <= std::numbers::pi / 2)) config_error(f + ".elevation", "must be in (0, pi/2]");
    if (!(s.range > 1e6)) config_error(f + ".range", "must be > 1e6 m");
    ids.push_back(s.id);
  }
  for (std::size_t i = 0; i < pseudolites.size(); ++i) {
    const auto& p = pseudolites[i];
    const std::string f = "pseudolites[" + std::to_string(i) + "]";
    if (p.id.empty()) config_error(f + ".id", "must be non-empty");
    if (!p.enu.allFinite()) config_error(f + ".enu", "must be finite");
    ids.push_back(p.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) config_error("satellites/pseudolites", "ids must be unique");
  if (satellites.size() + pseudolites.size() < 4) {
    config_error("satellites/pseudolites", "need at least 4 transmitters");
  }
  if (!(pr_sigma > 0.0)) config_error("pr_sigma", "must be > 0");
  if (!(pr_bias_sigma >= 0.0)) config_error("pr_bias_sigma", "must be >= 0");
  if (!(pr_bias_tau > 0.0)) config_error("pr_bias_tau", "must be > 0");
  if (!(clock_walk_sigma >= 0.0)) config_error("clock_walk_sigma", "must be >= 0");
  if (!(elevation_mask >= 0.0 && elevation_mask < std::numbers::pi / 2)) config_error("elevation_mask", "must be in [0, pi/2)");
  if (!base_enu.allFinite()) config_error("base_enu", "must be finite");
  if (!lever_arm.allFinite()) config_error("lever_arm", "must be finite");
  if (!(noise.gyro_noise_density > 0.0)) config_error("imu_noise.gyro_noise_density", "must be > 0");
  if (!(noise.accel_noise_density > 0.0)) config_error("imu_noise.accel_noise_density", "must be > 0");
  if (!(noise.gyro_bias_walk > 0.0)) config_error("imu_noise.gyro_bias_walk", "must be > 0");
  if (!(noise.accel_bias_walk > 0.0)) config_error("imu_noise.accel_bias_walk", "must be > 0");
}

double ScenarioConfig::pseudorange_sigma() const {
  return std::sqrt(pr_sigma * pr_sigma + pr_bias_sigma * pr_bias_sigma);
}

ImuNoiseParams ScenarioConfig::imu_noise() const {
  ImuNoiseParams n = noise;
  n.sample_rate = imu_rate;
  return n;
}

int ScenarioConfig::num_epochs() const {
  return static_cast<int>(std::llround(std::floor(duration * gnss_epoch_rate + 1e-9)));
}

double ScenarioConfig::epoch_time(int index) const { return index / gnss_epoch_rate; }

GroundTruth::GroundTruth(const ScenarioConfig& cfg)
    : trajectory_(cfg.trajectory),
      origin_(cfg.origin),
      origin_ecef_(geodetic_to_ecef(cfg.origin)),
      ecef_to_enu_(enu_rotation(cfg.origin)),
      duration_(cfg.duration),
      sample_period_(1.0 / cfg.imu_rate) {
  cfg.validate();
  const auto n = static_cast<long>(std::llround(duration_ * cfg.imu_rate));
  samples_.reserve(static_cast<std::size_t>(n + 1));
  for (long k = 0; k <= n; ++k) samples_.push_back(state(static_cast<double>(k) / cfg.imu_rate));
}

GroundTruth::Kinematics GroundTruth::kinematics(double t) const {
  Kinematics k;
  std::visit(Overloaded{
                 [&](const CircleTrajectory& c) {
                   const double w = c.speed / c.radius;
                   const double s = std::sin(w * t);
                   const double co = std::cos(w * t);
                   k.p = {c.radius * s, c.radius * (1.0 - co), 0.0};
                   k.v = {c.speed * co, c.speed * s, 0.0};
                   k.a = {-c.speed * w * s, c.speed * w * co, 0.0};
                   k.yaw = w * t;
                   k.yaw_rate = w;
                 },
                 [&](const FigureEightTrajectory& f) {
                   const double w = 2.0 * std::numbers::pi / f.period;
                   k.p = {f.scale * std::sin(w * t), 0.5 * f.scale * std::sin(2.0 * w * t), 0.0};
                   k.v = {f.scale * w * std::cos(w * t), f.scale * w * std::cos(2.0 * w * t), 0.0};
                   k.a = {-f.scale * w * w * std::sin(w * t), -2.0 * f.scale * w * w * std::sin(2.0 * w * t), 0.0};
                   k.yaw = std::atan2(k.v.y(), k.v.x());
                   k.yaw_rate = (k.v.x() * k.a.y() - k.v.y() * k.a.x()) / k.v.head<2>().squaredNorm();
                 },
                 [&](const StraightLineTrajectory& s) {
                   const Vec3 dir(std::cos(s.heading), std::sin(s.heading), 0.0);
                   k.p = s.speed * t * dir;
                   k.v = s.speed * dir;
                   k.a.setZero();
                   k.yaw = s.heading;
                   k.yaw_rate = 0.0;
                 }},
             trajectory_);
  return k;
}

Vec3 GroundTruth::position_enu(double t) const { return kinematics(t).p; }
double GroundTruth::yaw(double t) const { return kinematics(t).yaw; }

Vec3 GroundTruth::position(double t) const {
  return origin_ecef_ + ecef_to_enu_.transpose() * kinematics(t).p;
}
Vec3 GroundTruth::velocity(double t) const { return ecef_to_enu_.transpose() * kinematics(t).v; }
Vec3 GroundTruth::acceleration(double t) const { return ecef_to_enu_.transpose() * kinematics(t).a; }

Rotation GroundTruth::rotation(double t) const {
  return ecef_to_enu_.transpose() * Eigen::AngleAxisd(kinematics(t).yaw, Vec3::UnitZ()).toRotationMatrix();
}

Vec3 GroundTruth::angular_rate(double t) const { return {0.0, 0.0, kinematics(t).yaw_rate}; }

NavState GroundTruth::state(double t) const {
  const Kinematics k = kinematics(t);
  NavState s;
  s.epoch = t;
  s.position = origin_ecef_ + ecef_to_enu_.transpose() * k.p;
  s.velocity = ecef_to_enu_.transpose() * k.v;
  s.rotation = ecef_to_enu_.transpose() * Eigen::AngleAxisd(k.yaw, Vec3::UnitZ()).toRotationMatrix();
  return s;
}

Vec3 GroundTruth::interpolate_position(double t) const {
  if (!(t >= -1e-9 && t <= duration_ + 1e-9)) {
    std::ostringstream os;
    os << "epoch " << t << " outside ground-truth span [0, " << duration_ << "]";
    throw NavError(ErrorCode::kEpochMismatch, os.str());
  }
  const double u = std::clamp(t / sample_period_, 0.0, static_cast<double>(samples_.size() - 1));
  const auto lo = static_cast<std::size_t>(std::floor(u));
  const std::size_t hi = std::min(lo + 1, samples_.size() - 1);
  const double frac = u - static_cast<double>(lo);
  return (1.0 - frac) * samples_[lo].position + frac * samples_[hi].position;
}

Rotation GroundTruth::nearest_rotation(double t) const {
  const double u = std::clamp(t / sample_period_, 0.0, static_cast<double>(samples_.size() - 1));
  return samples_[static_cast<std::size_t>(std::llround(u))].rotation;
}

GroundTruth generate_trajectory(const ScenarioConfig& cfg) { return GroundTruth(cfg); }

std::vector<ImuSample> derive_imu_measurements(const GroundTruth& gt, const ScenarioConfig& cfg) {
  const double dt = 1.0 / cfg.imu_rate;
  const auto n = static_cast<long>(std::llround(cfg.duration * cfg.imu_rate));
  const double gyro_white = cfg.noise.gyro_noise_density * std::sqrt(cfg.imu_rate);
  const double accel_white = cfg.noise.accel_noise_density * std::sqrt(cfg.imu_rate);
  const double gyro_walk = cfg.noise.gyro_bias_walk * std::sqrt(dt);
  const double accel_walk = cfg.noise.accel_bias_walk * std::sqrt(dt);
  const double scale = cfg.inject_noise ? 1.0 : 0.0;

  std::mt19937_64 rng = make_stream(cfg.seed, kImuStream);
  auto draw3 = [&] { return Vec3(gaussian(rng), gaussian(rng), gaussian(rng)); };

  ImuBias bias = cfg.initial_bias;
  std::vector<ImuSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double t_mid = t - 0.5 * dt;
    // Specific force at the interval midpoint, resolved in the body frame at
    // the start of the interval: zero-order-hold integration of the sample
    // then reproduces the midpoint rule exactly.
    const Rotation R = gt.rotation(t - dt);
    const Vec3 g = gravity_ecef(gt.position(t_mid));

    // Draw order per sample is fixed: gyro walk, accel walk, gyro, accel.
    bias.gyro += scale * gyro_walk * draw3();
    bias.accel += scale * accel_walk * draw3();
    const Vec3 gyro_noise = scale * gyro_white * draw3();
    const Vec3 accel_noise = scale * accel_white * draw3();

    ImuSample s;
    s.t = t;
    s.gyro = gt.angular_rate(t_mid) + bias.gyro + gyro_noise;
    s.accel = R.transpose() * (gt.acceleration(t_mid) - g) + bias.accel + accel_noise;
    out.push_back(s);
  }
  return out;
}

PseudorangeGenerator::PseudorangeGenerator(const GroundTruth& gt, const ScenarioConfig& cfg)
    : gt_(gt), cfg_(cfg), clock_rng_(make_stream(cfg.seed, kClockStream)) {
  cfg_.validate();
  const Vec3 origin = geodetic_to_ecef(cfg_.origin);
  const Mat3 enu_to_ecef = enu_rotation(cfg_.origin).transpose();
  base_position_ = origin + enu_to_ecef * cfg_.base_enu;

  for (const auto& s : cfg_.satellites) {
    if (s.elevation < cfg_.elevation_mask) {
      notices_.push_back("satellite " + s.id + " below elevation mask, excluded");
      continue;
    }
    transmitters_.push_back({s.id, TransmitterKind::kGnssSatellite,
                             origin + enu_to_ecef * (s.range * satellite_los_enu(s.azimuth, s.elevation)),
                             s.clock_offset});
  }
  for (const auto& p : cfg_.pseudolites) {
    transmitters_.push_back({p.id, TransmitterKind::kPseudolite, origin + enu_to_ecef * p.enu, p.clock_offset});
  }
  for (const auto& tx : transmitters_) {
    rover_errors_.push_back({make_stream(cfg_.seed, kRoverPrStream, stable_hash(tx.id))});
    base_errors_.push_back({make_stream(cfg_.seed, kBasePrStream, stable_hash(tx.id))});
  }
}

double PseudorangeGenerator::draw_error(ErrorProcess& process, double dt) {
  // Both draws are always consumed so the stream layout does not depend on
  // the configured sigmas.
  const double z_corr = gaussian(process.rng);
  const double z_white = gaussian(process.rng);
  if (!cfg_.inject_noise) return 0.0;
  if (!process.started) {
    process.correlated = cfg_.pr_bias_sigma * z_corr;
    process.started = true;
  } else {
    const double phi = std::exp(-dt / cfg_.pr_bias_tau);
    process.correlated = phi * process.correlated + std::sqrt(1.0 - phi * phi) * cfg_.pr_bias_sigma * z_corr;
  }
  return process.correlated + cfg_.pr_sigma * z_white;
}

EpochObservations PseudorangeGenerator::generate(double epoch) {
  if (!(epoch >= gt_.start_time() - 1e-9 && epoch <= gt_.end_time() + 1e-9)) {
    throw NavError(ErrorCode::kInvalidInput, "generate: epoch outside the trajectory span");
  }
  if (!first_ && !(epoch > last_epoch_)) {
    throw NavError(ErrorCode::kInvalidInput, "generate: epochs must increase");
  }
  const double dt = first_ ? 0.0 : epoch - last_epoch_;
  const double walk = cfg_.inject_noise ? cfg_.clock_walk_sigma * std::sqrt(dt) : 0.0;
  const double z_rover = gaussian(clock_rng_);
  const double z_base = gaussian(clock_rng_);
  rover_clock_ += walk * z_rover;
  base_clock_ += walk * z_base;
  first_ = false;
  last_epoch_ = epoch;

  const Vec3 antenna = apply_lever_arm(gt_.rotation(epoch), gt_.position(epoch), cfg_.lever_arm);
  const double sigma = cfg_.pseudorange_sigma();

  EpochObservations out;
  out.epoch = epoch;
  out.transmitters = transmitters_;
  for (std::size_t i = 0; i < transmitters_.size(); ++i) {
    const auto& tx = transmitters_[i];
    const double rover_err = draw_error(rover_errors_[i], dt);
    const double base_err = draw_error(base_errors_[i], dt);
    out.rover.push_back({epoch, tx.id, predict_pseudorange(tx, antenna, rover_clock_) + rover_err, sigma});
    out.base.push_back({epoch, tx.id, predict_pseudorange(tx, base_position_, base_clock_) + base_err, sigma});
  }
  return out;
}

SimulatedDataset simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  SimulatedDataset ds{cfg, GroundTruth(cfg), {}, {}, Vec3::Zero(), {}};
  ds.config.noise.sample_rate = cfg.imu_rate;
  ds.imu = derive_imu_measurements(ds.truth, cfg);
  PseudorangeGenerator generator(ds.truth, cfg);
  const int k_epochs = cfg.num_epochs();
  for (int e = 0; e < k_epochs; ++e) ds.epochs.push_back(generator.generate(cfg.epoch_time(e)));
  ds.base_position = generator.base_position();
  ds.notices = generator.notices();
  return ds;
}

std::vector<ScenarioConfig> default_paper_scenarios(std::uint64_t seed) {
  ScenarioConfig base;
  base.seed = seed;
  base.origin = {0.8391543043588736, 0.20315632493213998, 530.0};
  base.trajectory = CircleTrajectory{20.0, 4.0};
  // Four high-elevation satellites with a deliberately weak geometry.
  base.satellites = {
      {"G05", 5.789142380556805, 0.6823238763733747, 2.2e7, 0.0},
      {"G13", 1.5093714463452241, 0.8787791359763555, 2.2e7, 0.0},
      {"G15", 1.2178856754399756, 0.5294330603874556, 2.2e7, 0.0},
      {"G24", 5.553952410179607, 0.500242919870888, 2.2e7, 0.0},
  };
  base.base_enu = {-15.0, 35.0, 2.0};
  // White plus slowly varying range error; the correlated part is what the
  // IMU cannot average away.
  base.pr_sigma = 0.7;
  base.pr_bias_sigma = 0.8;
  base.pr_bias_tau = 30.0;

  const PseudoliteSpec pl01{"PL01", {183.09353329371604, -122.6393467506405, 1.375670192252793}, 0.0};
  const PseudoliteSpec pl02{"PL02", {-97.96926682610592, -1.9144775322417824, 29.99461113718072}, 0.0};

  std::vector<ScenarioConfig> out(4, base);
  out[0].name = "GPS";
  out[1].name = "GPS+2PL";
  out[1].pseudolites = {pl01, pl02};
  out[2].name = "GPS+PL01";
  out[2].pseudolites = {pl01};
  out[3].name = "GPS+PL02";
  out[3].pseudolites = {pl02};
  return out;
}

}  // namespace plnav
