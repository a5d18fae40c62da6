#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "plnav/error.hpp"
#include "plnav/frames.hpp"
#include "plnav/pseudorange.hpp"

using namespace plnav;

namespace {

const GeodeticCoord kSite{0.8391543043588736, 0.20315632493213998, 530.0};

TransmitterState make_tx(const std::string& id, double az, double el, double range = 2.2e7,
                         double clock = 0.0) {
  const Vec3 origin = geodetic_to_ecef(kSite);
  const Vec3 los(std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el));
  return {id, TransmitterKind::kGnssSatellite,
          origin + enu_rotation(kSite).transpose() * (range * los), clock};
}

std::vector<TransmitterState> sky() {
  return {make_tx("G01", 0.3, 0.9), make_tx("G02", 2.0, 0.5), make_tx("G03", 3.5, 0.7),
          make_tx("G04", 5.0, 0.4), make_tx("G05", 1.0, 1.3)};
}

std::vector<SdObs> exact_sd(const std::vector<TransmitterState>& txs, const Vec3& rover,
                            double clock, const Vec3& base, double sigma = 1.0) {
  std::vector<SdObs> out;
  for (const auto& tx : txs) {
    out.push_back({0.0, tx.id, (tx.position - rover).norm() + clock - (tx.position - base).norm(),
                   sigma});
  }
  return out;
}

}  // namespace

TEST(Predict, Examples) {
  TransmitterState tx{"G01", TransmitterKind::kGnssSatellite, Vec3(1e7, 0, 0), 0.0};
  EXPECT_EQ(predict_pseudorange(tx, Vec3::Zero(), 0.0), 1e7);
  EXPECT_EQ(predict_pseudorange(tx, Vec3::Zero(), 10.0), 1e7 + 10.0);
  tx.clock_offset = 5.0;
  EXPECT_EQ(predict_pseudorange(tx, Vec3::Zero(), 0.0), 1e7 - 5.0);
  EXPECT_THROW(predict_pseudorange(tx, tx.position, 0.0), NavError);
}

TEST(SingleDifference, Examples) {
  const SdObs sd = single_difference({1.0, "G01", 100.0, 0.5}, {1.0, "G01", 90.0, 0.5});
  EXPECT_EQ(sd.sd_range, 10.0);
  EXPECT_DOUBLE_EQ(sd.sigma, std::sqrt(0.5));
  EXPECT_EQ(sd.transmitter_id, "G01");
  EXPECT_THROW(single_difference({1.0, "G01", 1, 1}, {1.0, "G02", 1, 1}), NavError);
  EXPECT_THROW(single_difference({1.0, "G01", 1, 1}, {1.1, "G01", 1, 1}), NavError);
}

TEST(SingleDifference, TransmitterClockCancels) {
  const auto txs = sky();
  const Vec3 base = geodetic_to_ecef(kSite);
  const Vec3 rover = base + Vec3(30, -20, 5);
  for (const auto& tx : txs) {
    TransmitterState shifted = tx;
    shifted.clock_offset = -3.0;
    const SdObs clean =
        single_difference({0, tx.id, predict_pseudorange(tx, rover, 1.5), 1},
                          {0, tx.id, predict_pseudorange(tx, base, 0.0), 1});
    const SdObs with_clock =
        single_difference({0, tx.id, predict_pseudorange(shifted, rover, 1.5), 1},
                          {0, tx.id, predict_pseudorange(shifted, base, 0.0), 1});
    EXPECT_NEAR(with_clock.sd_range, clean.sd_range, 1e-8);
  }
}

TEST(SolveLs, ZeroNoiseRecovery) {
  const auto all = sky();
  const std::vector<TransmitterState> txs(all.begin(), all.begin() + 4);
  const Vec3 base = geodetic_to_ecef(kSite);
  const Vec3 truth = base + Vec3(120, -40, 12);
  const auto obs = exact_sd(txs, truth, 3.2, base);
  LsConfig cfg;
  cfg.base_position = base;
  cfg.initial_guess = base;
  const LsSolution sol = solve_ls(obs, txs, cfg);
  EXPECT_TRUE(sol.converged);
  EXPECT_LT((sol.position - truth).norm(), 1e-6);
  EXPECT_NEAR(sol.clock, 3.2, 1e-6);
  EXPECT_EQ(sol.num_observations, 4);
  EXPECT_LE(sol.iterations, cfg.max_iterations);
}

TEST(SolveLs, FarInitialGuesses) {
  const auto txs = sky();
  const Vec3 base = geodetic_to_ecef(kSite);
  const Vec3 truth = base + Vec3(-15, 35, 2);
  const auto obs = exact_sd(txs, truth, -1.0, base);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    LsConfig cfg;
    cfg.base_position = base;
    cfg.initial_guess = truth + Vec3(u(rng), u(rng), u(rng)).normalized() * 1e5 * std::abs(u(rng));
    const LsSolution sol = solve_ls(obs, txs, cfg);
    EXPECT_TRUE(sol.converged);
    EXPECT_LT((sol.position - truth).norm(), 1e-6);
  }
}

TEST(SolveLs, ConstantOffsetShiftsClockOnly) {
  const auto txs = sky();
  const Vec3 base = geodetic_to_ecef(kSite);
  const Vec3 truth = base + Vec3(50, 60, -3);
  auto obs = exact_sd(txs, truth, 0.0, base);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.5);
  for (auto& o : obs) o.sd_range += n(rng);
  LsConfig cfg;
  cfg.base_position = base;
  cfg.initial_guess = base;
  const LsSolution a = solve_ls(obs, txs, cfg);
  for (auto& o : obs) o.sd_range += 42.0;
  const LsSolution b = solve_ls(obs, txs, cfg);
  EXPECT_LT((a.position - b.position).norm(), 1e-6);
  EXPECT_NEAR(b.clock - a.clock, 42.0, 1e-6);
}

TEST(SolveLs, CostNonIncreasing) {
  const auto txs = sky();
  const Vec3 base = geodetic_to_ecef(kSite);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto obs = exact_sd(txs, base + Vec3(10, 20, 0), 0.0, base, 2.0);
    for (auto& o : obs) o.sd_range += n(rng);
    LsConfig cfg;
    cfg.base_position = base;
    cfg.initial_guess = base + Vec3(1e4, -2e4, 5e3);
    const LsSolution sol = solve_ls(obs, txs, cfg);
    ASSERT_FALSE(sol.cost_history.empty());
    for (std::size_t k = 1; k < sol.cost_history.size(); ++k) {
      EXPECT_LE(sol.cost_history[k], sol.cost_history[k - 1]);
    }
  }
}

TEST(SolveLs, MonteCarloMatchesHdop) {
  const auto txs = sky();
  const Vec3 base = geodetic_to_ecef(kSite);
  const Vec3 truth = base + Vec3(5, 5, 0);
  const Rotation C = enu_rotation(ecef_to_geodetic(truth));
  const auto clean = exact_sd(txs, truth, 0.0, base);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  double sum_sq = 0.0;
  const int epochs = 1000;
  LsConfig cfg;
  cfg.base_position = base;
  cfg.initial_guess = truth;
  DopValues dop;
  for (int i = 0; i < epochs; ++i) {
    auto obs = clean;
    for (auto& o : obs) o.sd_range += n(rng);
    const LsSolution sol = solve_ls(obs, txs, cfg);
    const Vec3 enu = C * (sol.position - truth);
    sum_sq += enu.head<2>().squaredNorm();
    dop = sol.dop;
  }
  const double rms = std::sqrt(sum_sq / epochs);
  EXPECT_NEAR(rms, dop.hdop, 0.15 * dop.hdop) << "rms " << rms << " hdop " << dop.hdop;
}

TEST(SolveLs, Errors) {
  const auto txs = sky();
  const Vec3 base = geodetic_to_ecef(kSite);
  auto obs = exact_sd(txs, base, 0.0, base);
  LsConfig cfg;
  cfg.base_position = base;
  cfg.initial_guess = base;
  const std::vector<SdObs> three(obs.begin(), obs.begin() + 3);
  try {
    solve_ls(three, txs, cfg);
    ADD_FAILURE() << "expected underdetermined";
  } catch (const NavError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnderdetermined);
  }
  // Four copies of one line of sight.
  std::vector<TransmitterState> same;
  std::vector<SdObs> same_obs;
  for (int i = 0; i < 4; ++i) {
    TransmitterState tx = txs[0];
    tx.id = "D" + std::to_string(i);
    same.push_back(tx);
    same_obs.push_back({0.0, tx.id, 0.0, 1.0});
  }
  try {
    solve_ls(same_obs, same, cfg);
    ADD_FAILURE() << "expected geometry";
  } catch (const NavError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeometry);
  }
}

TEST(SolveLs, CovarianceIsScaledInverse) {
  const auto txs = sky();
  const Vec3 base = geodetic_to_ecef(kSite);
  const Vec3 truth = base + Vec3(7, -8, 1);
  const double sigma = 1.7;
  const auto obs = exact_sd(txs, truth, 0.3, base, sigma);
  LsConfig cfg;
  cfg.base_position = base;
  cfg.initial_guess = base;
  const LsSolution sol = solve_ls(obs, txs, cfg);
  Eigen::MatrixXd G(txs.size(), 4);
  for (std::size_t i = 0; i < txs.size(); ++i) {
    G.row(i) << -(txs[i].position - sol.position).normalized().transpose(), 1.0;
  }
  const Mat3 expected = sigma * sigma * (G.transpose() * G).inverse().topLeftCorner<3, 3>();
  EXPECT_LT((sol.covariance - expected).norm() / expected.norm(), 1e-9);
  EXPECT_LT((sol.covariance - sol.covariance.transpose()).norm(), 1e-12);
}

TEST(Dop, FrozenFourSatelliteOracle) {
  // LOS {E, N, U, normalize(-1,-1,-1)} at (lat 0, lon 0). Values from an
  // explicit 4x4 inversion in numpy.
  const Vec3 p = geodetic_to_ecef({0, 0, 0});
  const Rotation C = enu_rotation({0, 0, 0});
  std::vector<TransmitterState> txs;
  const std::vector<Vec3> enu = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(),
                                 Vec3(-1, -1, -1).normalized()};
  for (std::size_t i = 0; i < enu.size(); ++i) {
    txs.push_back({"T" + std::to_string(i), TransmitterKind::kGnssSatellite,
                   p + 2.2e7 * (C.transpose() * enu[i]), 0.0});
  }
  const DopValues d = compute_dop(txs, p);
  EXPECT_NEAR(d.gdop, 1.674469341998643, 1e-9);
  EXPECT_NEAR(d.pdop, 1.592450434036251, 1e-9);
  EXPECT_NEAR(d.hdop, 1.300230334687472, 1e-9);
  EXPECT_NEAR(d.vdop, 0.919401686761966, 1e-9);
}

TEST(Dop, Properties) {
  const auto txs = sky();
  const Vec3 p = geodetic_to_ecef(kSite);
  const DopValues d = compute_dop(txs, p);
  EXPECT_NEAR(d.pdop * d.pdop, d.hdop * d.hdop + d.vdop * d.vdop, 1e-9);
  EXPECT_GE(d.gdop, d.pdop);

  auto doubled = txs;
  for (const auto& tx : txs) {
    auto copy = tx;
    copy.id += "b";
    doubled.push_back(copy);
  }
  const DopValues h = compute_dop(doubled, p);
  EXPECT_NEAR(h.pdop, d.pdop / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(h.hdop, d.hdop / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(h.vdop, d.vdop / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(h.gdop, d.gdop / std::sqrt(2.0), 1e-9);
}

TEST(Dop, RotationInvariantPdop) {
  const auto txs = sky();
  const Vec3 p = geodetic_to_ecef(kSite);
  const double pdop = compute_dop(txs, p).pdop;
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Rotation R = so3_exp(Vec3(n(rng), n(rng), n(rng)));
    auto rotated = txs;
    for (auto& tx : rotated) tx.position = p + R * (tx.position - p);
    const DopValues d = compute_dop(rotated, p);
    EXPECT_NEAR(d.pdop, pdop, 1e-9);
  }
}

TEST(Dop, Singular) {
  const Vec3 p = geodetic_to_ecef(kSite);
  auto txs = sky();
  for (auto& tx : txs) tx.position = txs[0].position;
  EXPECT_THROW(compute_dop(txs, p), NavError);
}

TEST(PositionFactorCovariance, FloorAndFixed) {
  LsSolution sol;
  sol.covariance = Vec3(0.01, 4.0, 0.2).asDiagonal();
  sol.covariance(0, 1) = sol.covariance(1, 0) = 0.001;
  const Mat3 floored = position_factor_covariance(sol);
  EXPECT_EQ(floored(0, 0), 0.25);
  EXPECT_EQ(floored(1, 1), 4.0);
  EXPECT_EQ(floored(2, 2), 0.25);
  EXPECT_EQ(floored(0, 1), 0.001);
  EXPECT_TRUE(position_factor_covariance(sol, 0.5, 2.0).isApprox(4.0 * Mat3::Identity()));
}
