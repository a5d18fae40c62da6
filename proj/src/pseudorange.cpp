#include "plnav/pseudorange.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "plnav/error.hpp"

namespace plnav {
namespace {

constexpr double kMaxCondition = 1e12;

const TransmitterState& find_transmitter(std::span<const TransmitterState> txs, const std::string& id) {
  auto it = std::find_if(txs.begin(), txs.end(), [&](const TransmitterState& t) { return t.id == id; });
  if (it == txs.end()) {
    throw NavError(ErrorCode::kInvalidInput, "unknown transmitter '" + id + "'");
  }
  return *it;
}

void check_conditioning(const Eigen::Matrix4d& normal, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(normal, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw NavError(ErrorCode::kGeometry, std::string(what) + ": singular or ill-conditioned geometry");
  }
}

struct Linearization {
  Eigen::MatrixX4d jacobian;  // whitened
  Eigen::VectorXd residual;   // whitened, measured - predicted
};

class SdProblem {
 public:
  SdProblem(std::span<const SdObs> obs, std::span<const TransmitterState> txs, const Vec3& base)
      : obs_(obs) {
    tx_positions_.reserve(obs.size());
    base_ranges_.reserve(obs.size());
    for (const auto& o : obs) {
      if (!(o.sigma > 0.0)) throw NavError(ErrorCode::kInvalidInput, "SdObs sigma must be positive");
      const Vec3& p = find_transmitter(txs, o.transmitter_id).position;
      tx_positions_.push_back(p);
      base_ranges_.push_back((p - base).norm());
    }
  }

  Linearization linearize(const Eigen::Vector4d& x) const {
    const auto n = static_cast<Eigen::Index>(obs_.size());
    Linearization lin{Eigen::MatrixX4d(n, 4), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec3 d = tx_positions_[i] - x.head<3>();
      const double range = d.norm();
      if (!(range > 0.0)) throw NavError(ErrorCode::kGeometry, "receiver coincides with transmitter");
      const double w = 1.0 / obs_[i].sigma;
      lin.jacobian.row(i) << -w * d.transpose() / range, w;
      lin.residual(i) = w * (obs_[i].sd_range - (range - base_ranges_[i] + x(3)));
    }
    return lin;
  }

  double cost(const Eigen::Vector4d& x) const { return linearize(x).residual.squaredNorm(); }

 private:
  std::span<const SdObs> obs_;
  std::vector<Vec3> tx_positions_;
  std::vector<double> base_ranges_;
};

}  // namespace

std::string_view to_string(TransmitterKind kind) {
  return kind == TransmitterKind::kPseudolite ? "pseudolite" : "gnss";
}

TransmitterKind transmitter_kind_from_string(std::string_view s) {
  if (s == "gnss") return TransmitterKind::kGnssSatellite;
  if (s == "pseudolite") return TransmitterKind::kPseudolite;
  throw NavError(ErrorCode::kInvalidInput, "unknown transmitter kind '" + std::string(s) + "'");
}

double predict_pseudorange(const TransmitterState& tx, const Vec3& rx_position, double rx_clock) {
  const double range = (tx.position - rx_position).norm();
  if (!(range > 0.0)) {
    throw NavError(ErrorCode::kInvalidInput, "predict_pseudorange: receiver at transmitter position");
  }
  return range + rx_clock - tx.clock_offset;
}

SdObs single_difference(const PseudorangeObs& rover, const PseudorangeObs& base) {
  if (rover.transmitter_id != base.transmitter_id) {
    throw NavError(ErrorCode::kInvalidInput, "single_difference: transmitter mismatch " +
                                                 rover.transmitter_id + " vs " + base.transmitter_id);
  }
  if (std::abs(rover.epoch - base.epoch) > 1e-6) {
    throw NavError(ErrorCode::kInvalidInput, "single_difference: epoch mismatch");
  }
  return {rover.epoch, rover.transmitter_id, rover.range - base.range,
          std::sqrt(rover.sigma * rover.sigma + base.sigma * base.sigma)};
}

LsSolution solve_ls(std::span<const SdObs> obs, std::span<const TransmitterState> txs,
                    const LsConfig& cfg) {
  if (obs.size() < 4) {
    throw NavError(ErrorCode::kUnderdetermined,
                   "solve_ls: " + std::to_string(obs.size()) + " observations, need at least 4");
  }
  if (cfg.max_iterations < 1 || !(cfg.step_tolerance > 0.0) || !cfg.initial_guess.allFinite()) {
    throw NavError(ErrorCode::kInvalidInput, "solve_ls: invalid LsConfig");
  }
  const SdProblem problem(obs, txs, cfg.base_position);

  LsSolution sol;
  sol.epoch = obs.front().epoch;
  sol.num_observations = static_cast<int>(obs.size());

  Eigen::Vector4d x;
  x << cfg.initial_guess, 0.0;
  double cost = problem.cost(x);
  sol.cost_history.push_back(cost);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    sol.iterations = it;
    const Linearization lin = problem.linearize(x);
    const Eigen::Matrix4d normal = lin.jacobian.transpose() * lin.jacobian;
    check_conditioning(normal, "solve_ls");
    const Eigen::Vector4d step = normal.ldlt().solve(lin.jacobian.transpose() * lin.residual);

    // Step halving keeps the accepted cost sequence non-increasing far from
    // the solution, where the linearization can overshoot.
    double scale = 1.0;
    bool accepted = false;
    for (int k = 0; k < 12; ++k, scale *= 0.5) {
      const Eigen::Vector4d candidate = x + scale * step;
      const double candidate_cost = problem.cost(candidate);
      if (candidate_cost <= cost) {
        x = candidate;
        cost = candidate_cost;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No reduction resolvable above rounding: converged when the step is
      // tiny in metres or in units of the solution's own sigma.
      sol.converged = step.head<3>().norm() < 100.0 * cfg.step_tolerance || step.dot(normal * step) < 1e-6;
      break;
    }
    sol.cost_history.push_back(cost);
    if ((scale * step).head<3>().norm() < cfg.step_tolerance) {
      sol.converged = true;
      break;
    }
  }

  const Linearization lin = problem.linearize(x);
  const Eigen::Matrix4d normal = lin.jacobian.transpose() * lin.jacobian;
  check_conditioning(normal, "solve_ls");
  const Eigen::Matrix4d cov = normal.inverse();
  sol.position = x.head<3>();
  sol.clock = x(3);
  sol.covariance = 0.5 * (cov.topLeftCorner<3, 3>() + cov.topLeftCorner<3, 3>().transpose());

  std::vector<TransmitterState> used;
  used.reserve(obs.size());
  for (const auto& o : obs) used.push_back(find_transmitter(txs, o.transmitter_id));
  sol.dop = compute_dop(used, sol.position);
  return sol;
}

DopValues compute_dop(std::span<const TransmitterState> txs, const Vec3& p) {
  if (txs.size() < 4) {
    throw NavError(ErrorCode::kUnderdetermined, "compute_dop: need at least 4 transmitters");
  }
  Eigen::MatrixX4d G(static_cast<Eigen::Index>(txs.size()), 4);
  for (std::size_t i = 0; i < txs.size(); ++i) {
    const Vec3 d = txs[i].position - p;
    const double range = d.norm();
    if (!(range > 0.0)) throw NavError(ErrorCode::kGeometry, "compute_dop: point at transmitter");
    G.row(static_cast<Eigen::Index>(i)) << -d.transpose() / range, 1.0;
  }
  const Eigen::Matrix4d normal = G.transpose() * G;
  check_conditioning(normal, "compute_dop");
  const Eigen::Matrix4d Q = normal.inverse();

  const Mat3 C = enu_rotation(ecef_to_geodetic(p));
  const Mat3 Q_enu = C * Q.topLeftCorner<3, 3>() * C.transpose();

  DopValues dop;
  dop.gdop = std::sqrt(Q.trace());
  dop.pdop = std::sqrt(Q.topLeftCorner<3, 3>().trace());
  dop.hdop = std::sqrt(Q_enu(0, 0) + Q_enu(1, 1));
  dop.vdop = std::sqrt(Q_enu(2, 2));
  return dop;
}

Mat3 position_factor_covariance(const LsSolution& sol, double floor_sigma, double fixed_sigma) {
  if (fixed_sigma > 0.0) return fixed_sigma * fixed_sigma * Mat3::Identity();
  Mat3 cov = sol.covariance;
  const double floor_var = floor_sigma * floor_sigma;
  for (int i = 0; i < 3; ++i) cov(i, i) = std::max(cov(i, i), floor_var);
  return cov;
}

}  // namespace plnav
