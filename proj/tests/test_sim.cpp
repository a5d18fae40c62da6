#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "plnav/error.hpp"
#include "plnav/imu_preintegration.hpp"
#include "plnav/pseudorange.hpp"
#include "plnav/sim.hpp"

using namespace plnav;

namespace {

ScenarioConfig base_config() {
  ScenarioConfig cfg = default_paper_scenarios().front();
  cfg.duration = 10.0;
  return cfg;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Non-overlapping Allan variance of one axis at cluster size m.
double allan_variance(const std::vector<double>& x, std::size_t m) {
  std::vector<double> means;
  for (std::size_t i = 0; i + m <= x.size(); i += m) {
    means.push_back(std::accumulate(x.begin() + i, x.begin() + i + m, 0.0) / m);
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < means.size(); ++i) sum += std::pow(means[i] - means[i - 1], 2);
  return 0.5 * sum / static_cast<double>(means.size() - 1);
}

std::vector<double> epoch_pdops(const SimulatedDataset& d) {
  std::vector<double> out;
  for (const auto& e : d.epochs) out.push_back(compute_dop(e.transmitters, d.truth.position(e.epoch)).pdop);
  return out;
}

}  // namespace

TEST(Trajectory, StraightLineDistance) {
  ScenarioConfig cfg = base_config();
  cfg.duration = 80.0;
  cfg.trajectory = StraightLineTrajectory{5.0, 0.7};
  const GroundTruth gt(cfg);
  const Vec3 d = gt.position_enu(80.0) - gt.position_enu(0.0);
  EXPECT_NEAR(d.norm(), 400.0, 1e-9);
  EXPECT_NEAR(std::atan2(d.y(), d.x()), 0.7, 1e-12);
  EXPECT_NEAR((gt.position(80.0) - gt.position(0.0)).norm(), 400.0, 1e-6);
}

TEST(Trajectory, CircleRate) {
  ScenarioConfig cfg = base_config();
  cfg.trajectory = CircleTrajectory{20.0, 4.0};
  const GroundTruth gt(cfg);
  for (double t = 0.0; t <= 10.0; t += 0.37) {
    EXPECT_NEAR(gt.angular_rate(t).norm(), 0.2, 1e-12);
    EXPECT_NEAR(gt.velocity(t).norm(), 4.0, 1e-9);
  }
}

TEST(Trajectory, FiniteDifferenceConsistency) {
  for (const TrajectorySpec& spec :
       {TrajectorySpec{CircleTrajectory{20.0, 4.0}}, TrajectorySpec{FigureEightTrajectory{30.0, 40.0}},
        TrajectorySpec{StraightLineTrajectory{5.0, 1.0}}}) {
    ScenarioConfig cfg = base_config();
    cfg.trajectory = spec;
    const GroundTruth gt(cfg);
    const Rotation C = enu_rotation(cfg.origin);
    const double h = 1e-4;
    for (double t = 0.5; t < 9.5; t += 0.77) {
      // Differenced in ENU: ECEF coordinates carry ~1e-9 m of rounding.
      const Vec3 v = gt.velocity(t);
      const Vec3 fd_v = C.transpose() * (gt.position_enu(t + h) - gt.position_enu(t - h)) / (2 * h);
      EXPECT_LT((fd_v - v).norm(), 1e-6 * std::max(1.0, v.norm())) << t;
      const Vec3 fd_a = (gt.velocity(t + h) - gt.velocity(t - h)) / (2 * h);
      EXPECT_LT((fd_a - gt.acceleration(t)).norm(), 1e-6) << t;
      // Body rate from R(t)^T dR/dt.
      const Vec3 fd_w = so3_log(gt.rotation(t - h).transpose() * gt.rotation(t + h)) / (2 * h);
      EXPECT_LT((fd_w - gt.angular_rate(t)).norm(), 1e-6) << t;
      // Forward axis along velocity, no roll or pitch.
      const Vec3 fwd = gt.rotation(t).col(0);
      EXPECT_NEAR(fwd.dot(v.normalized()), 1.0, 1e-9);
    }
  }
}

TEST(Trajectory, SamplesCoverSpan) {
  const ScenarioConfig cfg = base_config();
  const GroundTruth gt(cfg);
  ASSERT_EQ(gt.samples().size(), 2001u);
  EXPECT_EQ(gt.samples().front().epoch, 0.0);
  EXPECT_NEAR(gt.samples().back().epoch, 10.0, 1e-12);
  EXPECT_THROW(gt.interpolate_position(10.5), NavError);
  EXPECT_LT((gt.interpolate_position(3.0025) - gt.position(3.0025)).norm(), 1e-5);
}

TEST(Imu, ConstantVelocityIsGravityReaction) {
  ScenarioConfig cfg = base_config();
  cfg.trajectory = StraightLineTrajectory{5.0, 0.3};
  cfg.inject_noise = false;
  const GroundTruth gt(cfg);
  const auto imu = derive_imu_measurements(gt, cfg);
  ASSERT_EQ(imu.size(), 2000u);
  for (std::size_t k = 0; k < imu.size(); k += 97) {
    const double t = imu[k].t;
    EXPECT_EQ(imu[k].gyro, Vec3::Zero());
    const Vec3 expected = -gt.rotation(t).transpose() * gravity_ecef(gt.position(t - 0.0025));
    EXPECT_LT((imu[k].accel - expected).norm(), 1e-12);
  }
}

TEST(Imu, RoundTripThroughPreintegration) {
  for (const TrajectorySpec& spec :
       {TrajectorySpec{CircleTrajectory{20.0, 4.0}}, TrajectorySpec{FigureEightTrajectory{30.0, 40.0}}}) {
    ScenarioConfig cfg = base_config();
    cfg.trajectory = spec;
    cfg.inject_noise = false;
    const GroundTruth gt(cfg);
    const auto imu = derive_imu_measurements(gt, cfg);
    for (double t0 = 0.0; t0 + 1.0 <= 10.0; t0 += 1.0) {
      const NavState si = gt.state(t0);
      const auto pre = preintegrate(imu, t0, t0 + 1.0, {}, cfg.imu_noise());
      const NavState sj = predict_state(si, pre, gravity_ecef(si.position));
      EXPECT_LT((sj.position - gt.position(t0 + 1.0)).norm(), 1e-3) << t0;
    }
  }
}

TEST(Imu, AllanVarianceMatchesDensities) {
  ScenarioConfig cfg = base_config();
  cfg.duration = 200.0;
  cfg.trajectory = StraightLineTrajectory{5.0, 0.0};
  cfg.noise.gyro_bias_walk = 1e-12;
  cfg.noise.accel_bias_walk = 1e-12;
  const GroundTruth gt(cfg);
  const auto imu = derive_imu_measurements(gt, cfg);
  std::vector<double> gx, az;
  for (const auto& s : imu) {
    gx.push_back(s.gyro.x());
    az.push_back(s.accel.z());
  }
  const double az_mean = mean_of(az);
  for (auto& v : az) v -= az_mean;
  for (std::size_t m : {1u, 5u, 20u}) {
    const double tau = m / cfg.imu_rate;
    const double gyro_expected = std::pow(cfg.noise.gyro_noise_density, 2) / tau;
    const double accel_expected = std::pow(cfg.noise.accel_noise_density, 2) / tau;
    EXPECT_NEAR(allan_variance(gx, m), gyro_expected, 0.1 * gyro_expected) << m;
    EXPECT_NEAR(allan_variance(az, m), accel_expected, 0.1 * accel_expected) << m;
  }
}

TEST(Imu, BiasWalkGrowth) {
  // Bias after T seconds has variance walk^2 * T; check across runs.
  ScenarioConfig cfg = base_config();
  cfg.duration = 4.0;
  cfg.noise.gyro_noise_density = 1e-12;
  cfg.noise.accel_noise_density = 1e-12;
  const double T = cfg.duration;
  double sum_sq = 0.0;
  const int runs = 400;
  for (int r = 0; r < runs; ++r) {
    cfg.seed = 1000 + r;
    const GroundTruth gt(cfg);
    const auto imu = derive_imu_measurements(gt, cfg);
    const auto clean = [&] {
      ScenarioConfig z = cfg;
      z.inject_noise = false;
      return derive_imu_measurements(gt, z);
    }();
    sum_sq += (imu.back().gyro - clean.back().gyro).squaredNorm();
  }
  const double expected = 3.0 * std::pow(cfg.noise.gyro_bias_walk, 2) * T;
  EXPECT_NEAR(sum_sq / runs, expected, 0.15 * expected);
}

TEST(Pseudorange, ZeroNoiseRangesAreGeometric) {
  ScenarioConfig cfg = base_config();
  cfg.inject_noise = false;
  const auto d = simulate(cfg);
  for (const auto& e : d.epochs) {
    const NavState s = d.truth.state(e.epoch);
    const Vec3 antenna = apply_lever_arm(s.rotation, s.position, cfg.lever_arm);
    ASSERT_EQ(e.rover.size(), e.transmitters.size());
    for (std::size_t i = 0; i < e.rover.size(); ++i) {
      const auto& tx = e.transmitters[i];
      EXPECT_EQ(e.rover[i].transmitter_id, tx.id);
      EXPECT_NEAR(e.rover[i].range, (tx.position - antenna).norm(), 1e-7);
      EXPECT_NEAR(e.base[i].range, (tx.position - d.base_position).norm(), 1e-7);
    }
  }
}

TEST(Pseudorange, TransmitterClockCancels) {
  ScenarioConfig cfg = base_config();
  ScenarioConfig shifted = cfg;
  for (auto& s : shifted.satellites) s.clock_offset = -3.0;
  for (auto& p : shifted.pseudolites) p.clock_offset = -3.0;
  const auto a = simulate(cfg);
  const auto b = simulate(shifted);
  for (std::size_t k = 0; k < a.epochs.size(); ++k) {
    for (std::size_t i = 0; i < a.epochs[k].rover.size(); ++i) {
      EXPECT_NEAR(b.epochs[k].rover[i].range - a.epochs[k].rover[i].range, 3.0, 1e-7);
      EXPECT_NEAR(b.epochs[k].base[i].range - a.epochs[k].base[i].range, 3.0, 1e-7);
      const SdObs sa = single_difference(a.epochs[k].rover[i], a.epochs[k].base[i]);
      const SdObs sb = single_difference(b.epochs[k].rover[i], b.epochs[k].base[i]);
      EXPECT_NEAR(sa.sd_range, sb.sd_range, 1e-7);
    }
  }
}

TEST(Pseudorange, ZeroNoiseLsRecoversAntenna) {
  ScenarioConfig cfg = base_config();
  cfg.inject_noise = false;
  const auto d = simulate(cfg);
  for (const auto& e : d.epochs) {
    std::vector<SdObs> sd;
    for (std::size_t i = 0; i < e.rover.size(); ++i) sd.push_back(single_difference(e.rover[i], e.base[i]));
    LsConfig ls;
    ls.base_position = d.base_position;
    ls.initial_guess = d.base_position;
    const auto sol = solve_ls(sd, e.transmitters, ls);
    const NavState s = d.truth.state(e.epoch);
    EXPECT_LT((sol.position - apply_lever_arm(s.rotation, s.position, cfg.lever_arm)).norm(), 1e-6);
  }
}

TEST(Pseudorange, ElevationMaskExcludes) {
  ScenarioConfig cfg = base_config();
  cfg.satellites.push_back({"G99", 1.0, 0.05});
  const auto d = simulate(cfg);
  ASSERT_EQ(d.notices.size(), 1u);
  EXPECT_NE(d.notices[0].find("G99"), std::string::npos);
  for (const auto& tx : d.epochs[0].transmitters) EXPECT_NE(tx.id, "G99");
}

TEST(Pseudorange, TransmitterPlacement) {
  const ScenarioConfig cfg = base_config();
  const auto d = simulate(cfg);
  const Vec3 origin = geodetic_to_ecef(cfg.origin);
  for (const auto& tx : d.epochs[0].transmitters) {
    if (tx.kind == TransmitterKind::kGnssSatellite) {
      EXPECT_NEAR((tx.position - origin).norm(), 2.2e7, 1e-6);
      const double r = tx.position.norm();
      EXPECT_GE(r, 2.0e7);
      EXPECT_LE(r, 3.0e7);
    } else {
      const double h = ecef_to_geodetic(tx.position).height;
      EXPECT_GE(h, -100.0);
      EXPECT_LE(h, 1e4);
    }
  }
}

TEST(Scenarios, Shape) {
  const auto s = default_paper_scenarios(7);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].name, "GPS");
  EXPECT_EQ(s[1].name, "GPS+2PL");
  EXPECT_EQ(s[2].name, "GPS+PL01");
  EXPECT_EQ(s[3].name, "GPS+PL02");
  EXPECT_EQ(s[0].pseudolites.size(), 0u);
  EXPECT_EQ(s[1].pseudolites.size(), 2u);
  EXPECT_EQ(s[2].pseudolites.at(0).id, "PL01");
  EXPECT_EQ(s[3].pseudolites.at(0).id, "PL02");
  for (const auto& c : s) {
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.satellites.size(), 4u);
    EXPECT_EQ(c.duration, 80.0);
    EXPECT_NO_THROW(c.validate());
  }
}

TEST(Scenarios, DopRegime) {
  const auto configs = default_paper_scenarios();
  std::vector<std::vector<double>> pdops;
  for (auto cfg : configs) {
    cfg.inject_noise = false;
    pdops.push_back(epoch_pdops(simulate(cfg)));
  }
  for (double p : pdops[0]) EXPECT_GT(p, 6.0);
  EXPECT_LT(mean_of(pdops[1]), 4.0);

  const double targets[] = {8.75, 3.11, 4.02, 4.35};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(mean_of(pdops[i]), targets[i], 0.3 * targets[i]) << configs[i].name;
  }
  EXPECT_GT(mean_of(pdops[0]), mean_of(pdops[2]));
  EXPECT_GT(mean_of(pdops[0]), mean_of(pdops[3]));
  EXPECT_GT(mean_of(pdops[2]), mean_of(pdops[1]));
  EXPECT_GT(mean_of(pdops[3]), mean_of(pdops[1]));

  // Adding a pseudolite never increases PDOP.
  for (std::size_t k = 0; k < pdops[0].size(); ++k) {
    EXPECT_LE(pdops[2][k], pdops[0][k] + 1e-12);
    EXPECT_LE(pdops[3][k], pdops[0][k] + 1e-12);
    EXPECT_LE(pdops[1][k], pdops[2][k] + 1e-12);
    EXPECT_LE(pdops[1][k], pdops[3][k] + 1e-12);
  }
}

TEST(Scenarios, SharedStreams) {
  auto configs = default_paper_scenarios(3);
  for (auto& c : configs) c.duration = 10.0;
  const auto gps = simulate(configs[0]);
  const auto both = simulate(configs[1]);
  ASSERT_EQ(gps.imu.size(), both.imu.size());
  for (std::size_t k = 0; k < gps.imu.size(); ++k) {
    ASSERT_EQ(gps.imu[k].gyro, both.imu[k].gyro);
    ASSERT_EQ(gps.imu[k].accel, both.imu[k].accel);
  }
  // Satellite observations are unaffected by the extra pseudolites.
  for (std::size_t k = 0; k < gps.epochs.size(); ++k) {
    for (std::size_t i = 0; i < gps.epochs[k].rover.size(); ++i) {
      EXPECT_EQ(gps.epochs[k].rover[i].range, both.epochs[k].rover[i].range);
      EXPECT_EQ(gps.epochs[k].base[i].range, both.epochs[k].base[i].range);
    }
  }
}

TEST(Simulate, Deterministic) {
  const ScenarioConfig cfg = base_config();
  const auto a = simulate(cfg);
  const auto b = simulate(cfg);
  ASSERT_EQ(a.imu.size(), b.imu.size());
  for (std::size_t k = 0; k < a.imu.size(); ++k) {
    ASSERT_EQ(a.imu[k].t, b.imu[k].t);
    ASSERT_EQ(a.imu[k].gyro, b.imu[k].gyro);
    ASSERT_EQ(a.imu[k].accel, b.imu[k].accel);
  }
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (std::size_t k = 0; k < a.epochs.size(); ++k) {
    for (std::size_t i = 0; i < a.epochs[k].rover.size(); ++i) {
      ASSERT_EQ(a.epochs[k].rover[i].range, b.epochs[k].rover[i].range);
      ASSERT_EQ(a.epochs[k].base[i].range, b.epochs[k].base[i].range);
    }
  }
  ScenarioConfig other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(simulate(other).imu[5].gyro, a.imu[5].gyro);
}

TEST(Simulate, EpochsInsideTruthSpan) {
  const ScenarioConfig cfg = base_config();
  const auto d = simulate(cfg);
  ASSERT_EQ(static_cast<int>(d.epochs.size()), cfg.num_epochs());
  for (const auto& e : d.epochs) {
    EXPECT_GE(e.epoch, d.truth.start_time());
    EXPECT_LE(e.epoch, d.truth.end_time());
  }
}

TEST(Config, ValidationNamesField) {
  ScenarioConfig cfg = base_config();
  cfg.duration = 0.0;
  try {
    cfg.validate();
    ADD_FAILURE();
  } catch (const NavError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("duration"), std::string::npos);
  }
  cfg = base_config();
  cfg.satellites[1].elevation = 2.0;
  EXPECT_THROW(cfg.validate(), NavError);
  cfg = base_config();
  cfg.trajectory = CircleTrajectory{20.0, 0.0};
  EXPECT_THROW(cfg.validate(), NavError);
}

TEST(Streams, StableHashFrozen) {
  // FNV-1a 64, independently computed.
  EXPECT_EQ(stable_hash(""), 1469598103934665603ull);
  EXPECT_EQ(stable_hash("PL01"), 3945025990564111268ull);
  auto a = make_stream(1, 2, 3);
  auto b = make_stream(1, 2, 3);
  auto c = make_stream(1, 2, 4);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}
