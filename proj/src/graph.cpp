#include "plnav/graph.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "plnav/error.hpp"

namespace plnav {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using JacobianBlock = Eigen::Matrix<double, Eigen::Dynamic, 15>;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_spd(const MatrixXd& m) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::LLT<MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

/// Maps residual r with covariance cov to L^{-1} r, where cov = L L^T.
class Whitener {
 public:
  explicit Whitener(const MatrixXd& covariance) : llt_(covariance) {
    if (llt_.info() != Eigen::Success) {
      throw NavError(ErrorCode::kInvalidInput, "factor covariance is not positive definite");
    }
  }
  VectorXd apply(const VectorXd& r) const { return llt_.matrixL().solve(r); }
  MatrixXd apply(const MatrixXd& J) const { return llt_.matrixL().solve(J); }

 private:
  Eigen::LLT<MatrixXd> llt_;
};

MatrixXd bias_covariance(const BiasFactor& f) {
  MatrixXd cov = MatrixXd::Zero(6, 6);
  cov.topLeftCorner<3, 3>() = f.accel_covariance;
  cov.bottomRightCorner<3, 3>() = f.gyro_covariance;
  return cov;
}

const NavState& state_at(std::span<const NavState> states, std::size_t i) {
  if (i >= states.size()) throw NavError(ErrorCode::kInvalidInput, "factor index out of range");
  return states[i];
}

}  // namespace

std::string_view factor_name(const Factor& f) {
  return std::visit(Overloaded{[](const PriorFactor&) { return std::string_view("prior"); },
                               [](const ImuFactor&) { return std::string_view("imu"); },
                               [](const BiasFactor&) { return std::string_view("bias"); },
                               [](const PositionFactor&) { return std::string_view("position"); }},
                    f);
}

void FactorGraph::validate() const {
  if (num_states == 0) throw NavError(ErrorCode::kInvalidInput, "graph has no states");
  std::vector<bool> touched(num_states, false);
  auto check_pair = [&](std::size_t i, std::size_t j) {
    if (j != i + 1 || j >= num_states) {
      throw NavError(ErrorCode::kInvalidInput, "binary factor must connect consecutive states in range");
    }
    touched[i] = touched[j] = true;
  };
  for (const auto& f : factors) {
    std::visit(Overloaded{
                   [&](const PriorFactor& p) {
                     if (!is_spd(p.covariance)) throw NavError(ErrorCode::kInvalidInput, "prior covariance not SPD");
                     touched[0] = true;
                   },
                   [&](const ImuFactor& p) {
                     check_pair(p.i, p.j);
                     if (!is_spd(p.pre.covariance)) throw NavError(ErrorCode::kInvalidInput, "IMU covariance not SPD");
                   },
                   [&](const BiasFactor& p) {
                     check_pair(p.i, p.j);
                     if (!is_spd(bias_covariance(p))) throw NavError(ErrorCode::kInvalidInput, "bias covariance not SPD");
                   },
                   [&](const PositionFactor& p) {
                     if (p.index >= num_states) throw NavError(ErrorCode::kInvalidInput, "position factor index out of range");
                     if (!is_spd(p.covariance)) throw NavError(ErrorCode::kInvalidInput, "position covariance not SPD");
                     touched[p.index] = true;
                   }},
               f);
  }
  for (std::size_t i = 0; i < num_states; ++i) {
    if (!touched[i]) throw NavError(ErrorCode::kInvalidInput, "state " + std::to_string(i) + " has no factor");
  }
}

std::size_t FactorGraph::count(std::string_view name) const {
  return static_cast<std::size_t>(std::count_if(factors.begin(), factors.end(),
                                                [&](const Factor& f) { return factor_name(f) == name; }));
}

Vec15 prior_residual(const NavState& s, const PriorFactor& f) {
  Vec15 r;
  r << so3_log(f.target.rotation.transpose() * s.rotation), s.position - f.target.position,
      s.velocity - f.target.velocity, s.bias.accel - f.target.bias.accel, s.bias.gyro - f.target.bias.gyro;
  return r;
}

Vec3 position_residual(const NavState& s, const PositionFactor& f) {
  return apply_lever_arm(s.rotation, s.position, f.lever) - f.measurement;
}

std::pair<Vec3, Vec3> bias_residual(const NavState& s_i, const NavState& s_j) {
  return {s_j.bias.accel - s_i.bias.accel, s_j.bias.gyro - s_i.bias.gyro};
}

FactorLinearization linearize(const Factor& factor, std::span<const NavState> states) {
  using namespace tangent;
  FactorLinearization out;
  std::visit(
      Overloaded{
          [&](const PriorFactor& f) {
            const NavState& s = state_at(states, 0);
            const Vec15 r = prior_residual(s, f);
            JacobianBlock J = MatrixXd::Identity(15, 15);
            J.block<3, 3>(0, kRot) = so3_right_jacobian_inverse(r.head<3>());
            const Whitener w(f.covariance);
            out.residual = w.apply(VectorXd(r));
            out.blocks.emplace_back(0, w.apply(MatrixXd(J)));
          },
          [&](const ImuFactor& f) {
            const NavState& si = state_at(states, f.i);
            const NavState& sj = state_at(states, f.j);
            const ImuResidualJacobians J = residual_jacobians(si, sj, f.pre, f.gravity);
            const Whitener w(f.pre.covariance);
            out.residual = w.apply(VectorXd(imu_residual(si, sj, f.pre, f.gravity).stacked()));
            out.blocks.emplace_back(f.i, w.apply(MatrixXd(J.wrt_i)));
            out.blocks.emplace_back(f.j, w.apply(MatrixXd(J.wrt_j)));
          },
          [&](const BiasFactor& f) {
            const auto [ra, rg] = bias_residual(state_at(states, f.i), state_at(states, f.j));
            VectorXd r(6);
            r << ra, rg;
            JacobianBlock Ji = MatrixXd::Zero(6, 15);
            Ji.block<3, 3>(0, kBa) = -Mat3::Identity();
            Ji.block<3, 3>(3, kBg) = -Mat3::Identity();
            const JacobianBlock Jj = -Ji;
            const Whitener w(bias_covariance(f));
            out.residual = w.apply(r);
            out.blocks.emplace_back(f.i, w.apply(MatrixXd(Ji)));
            out.blocks.emplace_back(f.j, w.apply(MatrixXd(Jj)));
          },
          [&](const PositionFactor& f) {
            const NavState& s = state_at(states, f.index);
            JacobianBlock J = MatrixXd::Zero(3, 15);
            J.block<3, 3>(0, kRot) = -s.rotation * skew(f.lever);
            J.block<3, 3>(0, kPos) = Mat3::Identity();
            const Whitener w(f.covariance);
            out.residual = w.apply(VectorXd(position_residual(s, f)));
            out.blocks.emplace_back(f.index, w.apply(MatrixXd(J)));
          }},
      factor);
  return out;
}

Eigen::VectorXd whitened_residual(const Factor& factor, std::span<const NavState> states) {
  return std::visit(
      Overloaded{[&](const PriorFactor& f) -> VectorXd {
                   return Whitener(f.covariance).apply(VectorXd(prior_residual(state_at(states, 0), f)));
                 },
                 [&](const ImuFactor& f) -> VectorXd {
                   const auto r = imu_residual(state_at(states, f.i), state_at(states, f.j), f.pre, f.gravity);
                   return Whitener(f.pre.covariance).apply(VectorXd(r.stacked()));
                 },
                 [&](const BiasFactor& f) -> VectorXd {
                   const auto [ra, rg] = bias_residual(state_at(states, f.i), state_at(states, f.j));
                   VectorXd r(6);
                   r << ra, rg;
                   return Whitener(bias_covariance(f)).apply(r);
                 },
                 [&](const PositionFactor& f) -> VectorXd {
                   return Whitener(f.covariance).apply(VectorXd(position_residual(state_at(states, f.index), f)));
                 }},
      factor);
}

double total_cost(const FactorGraph& graph, std::span<const NavState> states) {
  double cost = 0.0;
  for (const auto& f : graph.factors) cost += whitened_residual(f, states).squaredNorm();
  return cost;
}

void OptimizerConfig::validate() const {
  const bool ok = max_iterations > 0 && initial_lambda > 0.0 && lambda_up > 1.0 && lambda_down > 0.0 &&
                  lambda_down < 1.0 && max_lambda > initial_lambda && cost_tolerance > 0.0 && step_tolerance > 0.0;
  if (!ok) throw NavError(ErrorCode::kInvalidInput, "OptimizerConfig: invalid parameters");
}

std::vector<double> OptimizationResult::accepted_costs() const {
  std::vector<double> costs{initial_cost};
  for (const auto& entry : log) {
    if (entry.accepted) costs.push_back(entry.cost);
  }
  return costs;
}

std::optional<Eigen::VectorXd> solve_block_tridiagonal(std::span<const Mat15> diagonal,
                                                       std::span<const Mat15> upper,
                                                       const Eigen::VectorXd& rhs) {
  const std::size_t n = diagonal.size();
  if (n == 0 || upper.size() + 1 != n || rhs.size() != static_cast<Eigen::Index>(15 * n)) {
    throw NavError(ErrorCode::kInvalidInput, "solve_block_tridiagonal: inconsistent sizes");
  }
  // Block LDL^T: S_k = D_k - U_{k-1}^T S_{k-1}^{-1} U_{k-1}.
  std::vector<Eigen::LLT<Mat15>> pivots;
  pivots.reserve(n);
  std::vector<Vec15> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    Mat15 S = diagonal[k];
    Vec15 yk = rhs.segment<15>(static_cast<Eigen::Index>(15 * k));
    if (k > 0) {
      const Mat15 X = pivots[k - 1].solve(upper[k - 1]);
      S.noalias() -= upper[k - 1].transpose() * X;
      yk.noalias() -= X.transpose() * y[k - 1];
    }
    pivots.emplace_back(S);
    if (pivots.back().info() != Eigen::Success) return std::nullopt;
    y[k] = yk;
  }
  Eigen::VectorXd x(rhs.size());
  for (std::size_t k = n; k-- > 0;) {
    Vec15 t = y[k];
    if (k + 1 < n) t.noalias() -= upper[k] * x.segment<15>(static_cast<Eigen::Index>(15 * (k + 1)));
    x.segment<15>(static_cast<Eigen::Index>(15 * k)) = pivots[k].solve(t);
  }
  if (!x.allFinite()) return std::nullopt;
  return x;
}

OptimizationResult solve(const FactorGraph& graph, std::span<const NavState> initial_states,
                         const OptimizerConfig& cfg) {
  cfg.validate();
  graph.validate();
  if (initial_states.size() != graph.num_states) {
    throw NavError(ErrorCode::kInvalidInput, "solve: initial state count does not match graph");
  }
  const std::size_t n = graph.num_states;

  OptimizationResult result;
  result.states.assign(initial_states.begin(), initial_states.end());
  double cost = total_cost(graph, result.states);
  if (!std::isfinite(cost)) throw NavError(ErrorCode::kInvalidInput, "solve: non-finite initial residual");
  result.initial_cost = cost;

  double lambda = cfg.initial_lambda;
  std::vector<Mat15> diagonal(n);
  std::vector<Mat15> upper(n > 0 ? n - 1 : 0);
  Eigen::VectorXd gradient(static_cast<Eigen::Index>(15 * n));
  bool done = false;

  for (int iter = 1; iter <= cfg.max_iterations && !done; ++iter) {
    result.iterations = iter;
    if (cost == 0.0) {
      result.converged = true;
      result.message = "zero cost";
      break;
    }
    for (auto& m : diagonal) m.setZero();
    for (auto& m : upper) m.setZero();
    gradient.setZero();
    for (const auto& f : graph.factors) {
      const FactorLinearization lin = linearize(f, result.states);
      for (const auto& [a, Ja] : lin.blocks) {
        gradient.segment<15>(static_cast<Eigen::Index>(15 * a)).noalias() -= Ja.transpose() * lin.residual;
        for (const auto& [b, Jb] : lin.blocks) {
          if (a == b) {
            diagonal[a].noalias() += Ja.transpose() * Jb;
          } else if (b == a + 1) {
            upper[a].noalias() += Ja.transpose() * Jb;
          }
        }
      }
    }

    while (true) {
      std::vector<Mat15> damped = diagonal;
      for (auto& m : damped) {
        for (int d = 0; d < 15; ++d) m(d, d) += lambda * std::max(m(d, d), 1e-9);
      }
      const auto step = solve_block_tridiagonal(damped, upper, gradient);
      if (!step) {
        lambda *= cfg.lambda_up;
        if (lambda > cfg.max_lambda) {
          result.message = "normal matrix not positive definite after damping";
          done = true;
          break;
        }
        continue;
      }
      IterationLog entry{iter, cost, lambda, step->norm(), false};
      if (entry.step_norm < cfg.step_tolerance) {
        result.log.push_back(entry);
        result.converged = true;
        result.message = "step below tolerance";
        done = true;
        break;
      }
      std::vector<NavState> candidate(n);
      for (std::size_t k = 0; k < n; ++k) {
        candidate[k] = retract(result.states[k],
                               StateDelta::from_vector(step->segment<15>(static_cast<Eigen::Index>(15 * k))));
      }
      const double new_cost = total_cost(graph, candidate);
      if (std::isfinite(new_cost) && new_cost < cost) {
        const double relative = (cost - new_cost) / cost;
        result.states = std::move(candidate);
        cost = new_cost;
        entry.cost = cost;
        entry.accepted = true;
        result.log.push_back(entry);
        lambda = std::max(lambda * cfg.lambda_down, 1e-15);
        if (relative < cfg.cost_tolerance) {
          result.converged = true;
          result.message = "relative cost change below tolerance";
          done = true;
        }
        break;
      }
      result.log.push_back(entry);
      lambda *= cfg.lambda_up;
      if (lambda > cfg.max_lambda) {
        // No descent left at machine precision.
        result.converged = true;
        result.message = "cost stationary";
        done = true;
        break;
      }
    }
  }
  if (!done && !result.converged && result.message.empty()) result.message = "max iterations reached";
  result.final_cost = cost;

  for (const auto& f : graph.factors) {
    FactorReport rep;
    rep.type = std::string(factor_name(f));
    rep.cost = whitened_residual(f, result.states).squaredNorm();
    std::visit(Overloaded{[&](const PriorFactor& p) {
                            rep.residual_norm = prior_residual(result.states[0], p).norm();
                          },
                          [&](const ImuFactor& p) {
                            rep.first_index = p.i;
                            rep.residual_norm =
                                imu_residual(result.states[p.i], result.states[p.j], p.pre, p.gravity).stacked().norm();
                          },
                          [&](const BiasFactor& p) {
                            rep.first_index = p.i;
                            const auto [ra, rg] = bias_residual(result.states[p.i], result.states[p.j]);
                            rep.residual_norm = std::sqrt(ra.squaredNorm() + rg.squaredNorm());
                          },
                          [&](const PositionFactor& p) {
                            rep.first_index = p.index;
                            rep.residual_norm = position_residual(result.states[p.index], p).norm();
                          }},
               f);
    result.factor_report.push_back(std::move(rep));
  }
  return result;
}

FactorGraph build_graph(std::span<const LsSolution> ls_solutions, std::span<const ImuSample> imu,
                        const ImuNoiseParams& noise, const PriorFactor& prior, const Vec3& lever,
                        std::span<const NavState> initial_states, const GraphBuildOptions& options) {
  noise.validate();
  const std::size_t k_states = ls_solutions.size();
  if (k_states == 0) throw NavError(ErrorCode::kInvalidInput, "build_graph: no LS solutions");
  if (initial_states.size() != k_states) {
    throw NavError(ErrorCode::kInvalidInput, "build_graph: initial state count mismatch");
  }
  for (std::size_t k = 1; k < k_states; ++k) {
    if (!(ls_solutions[k].epoch > ls_solutions[k - 1].epoch)) {
      throw NavError(ErrorCode::kInvalidInput, "build_graph: LS epochs not strictly increasing");
    }
  }

  FactorGraph graph;
  graph.num_states = k_states;
  graph.factors.emplace_back(prior);
  for (std::size_t k = 0; k < k_states; ++k) {
    PositionFactor pf;
    pf.index = k;
    pf.measurement = ls_solutions[k].position;
    pf.covariance = position_factor_covariance(ls_solutions[k], options.sigma_p_floor, options.fixed_sigma_p);
    pf.lever = lever;
    graph.factors.emplace_back(pf);
    if (k + 1 == k_states) break;

    const double t_i = ls_solutions[k].epoch;
    const double t_j = ls_solutions[k + 1].epoch;
    ImuFactor imu_factor;
    imu_factor.i = k;
    imu_factor.j = k + 1;
    imu_factor.pre = preintegrate(imu, t_i, t_j, initial_states[k].bias, noise);
    imu_factor.gravity = options.gravity_override ? *options.gravity_override
                                                  : gravity_ecef(initial_states[k].position);
    graph.factors.emplace_back(std::move(imu_factor));

    BiasFactor bias_factor;
    bias_factor.i = k;
    bias_factor.j = k + 1;
    const double dt = t_j - t_i;
    bias_factor.accel_covariance = noise.accel_bias_walk * noise.accel_bias_walk * dt * Mat3::Identity();
    bias_factor.gyro_covariance = noise.gyro_bias_walk * noise.gyro_bias_walk * dt * Mat3::Identity();
    graph.factors.emplace_back(bias_factor);
  }
  return graph;
}

namespace {

struct HeadingFit {
  double yaw = 0.0;
  Vec3 velocity = Vec3::Zero();
};

// Fits antenna_k - R_k lever = p0 + v0 t + G_k + R0 dp_0k over the
// first epochs, with R0 = C^T Rz(yaw) and (cos yaw, sin yaw) relaxed to two
// free unknowns, which keeps the problem linear. Falls back to the velocity
// heading when the specific force leaves yaw unobservable.
std::optional<HeadingFit> fit_heading(std::span<const LsSolution> ls, std::span<const ImuSample> imu,
                                      const ImuNoiseParams& noise, const Vec3& lever,
                                      std::span<const Rotation> relative_rotation, std::size_t window) {
  const std::size_t n = std::min(window, ls.size());
  if (n < 3) return std::nullopt;
  const GeodeticCoord first = ecef_to_geodetic(ls.front().position);
  const Mat3 Ct = enu_rotation(first).transpose();
  // Gravity double integral along the LS track (trapezoid).
  std::vector<Vec3> gravity_term(n, Vec3::Zero());
  Vec3 gv = Vec3::Zero();
  Vec3 g_prev = gravity_ecef(ls[0].position);
  for (std::size_t k = 1; k < n; ++k) {
    const double h = ls[k].epoch - ls[k - 1].epoch;
    const Vec3 g_k = gravity_ecef(ls[k].position);
    const Vec3 gv_next = gv + 0.5 * h * (g_prev + g_k);
    gravity_term[k] = gravity_term[k - 1] + 0.5 * h * (gv + gv_next) - h * h * (g_k - g_prev) / 12.0;
    gv = gv_next;
    g_prev = g_k;
  }

  std::vector<Vec3> dp(n, Vec3::Zero());
  double horizontal = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    dp[k] = preintegrate(imu, ls[0].epoch, ls[k].epoch, ImuBias{}, noise).delta_p;
    horizontal = std::max(horizontal, dp[k].head<2>().norm());
  }
  const bool yaw_observable = horizontal > 1.0;

  HeadingFit fit;
  for (int pass = 0; pass < 2; ++pass) {
    const Mat3 R0 = Ct * Eigen::AngleAxisd(fit.yaw, Vec3::UnitZ()).toRotationMatrix();
    const int cols = yaw_observable ? 8 : 6;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * static_cast<Eigen::Index>(n), cols);
    Eigen::VectorXd y(3 * static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const double t = ls[k].epoch - ls[0].epoch;
      const auto r = 3 * static_cast<Eigen::Index>(k);
      A.block<3, 3>(r, 0) = Mat3::Identity();
      A.block<3, 3>(r, 3) = t * Mat3::Identity();
      Vec3 rhs = ls[k].position - R0 * relative_rotation[k] * lever - gravity_term[k];
      if (yaw_observable) {
        A.block<3, 1>(r, 6) = Ct * Vec3(dp[k].x(), dp[k].y(), 0.0);
        A.block<3, 1>(r, 7) = Ct * Vec3(-dp[k].y(), dp[k].x(), 0.0);
        rhs -= Ct * Vec3(0.0, 0.0, dp[k].z());
      } else {
        rhs -= R0 * dp[k];
      }
      y.segment<3>(r) = rhs;
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
    fit.velocity = x.segment<3>(3);
    if (yaw_observable) {
      fit.yaw = std::atan2(x(7), x(6));
    } else {
      const Vec3 v_enu = enu_rotation(first) * fit.velocity;
      if (v_enu.head<2>().norm() < 1e-3) return std::nullopt;
      fit.yaw = std::atan2(v_enu.y(), v_enu.x());
    }
  }
  return fit;
}

}  // namespace

std::vector<NavState> initialize_states(std::span<const LsSolution> ls_solutions,
                                        std::span<const ImuSample> imu, const ImuNoiseParams& noise,
                                        const Vec3& lever, const InitConfig& cfg) {
  const std::size_t k_states = ls_solutions.size();
  if (k_states == 0) throw NavError(ErrorCode::kInvalidInput, "initialize_states: no LS solutions");
  std::vector<NavState> states(k_states);

  for (std::size_t k = 0; k < k_states; ++k) {
    states[k].epoch = ls_solutions[k].epoch;
    if (cfg.velocity == VelocityInit::kZero || k_states == 1) continue;
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == k_states ? k : k + 1;
    states[k].velocity = (ls_solutions[hi].position - ls_solutions[lo].position) /
                         (ls_solutions[hi].epoch - ls_solutions[lo].epoch);
  }

  // Attitude relative to node 0 from the gyro alone.
  std::vector<Rotation> relative(k_states, Rotation::Identity());
  for (std::size_t k = 1; k < k_states; ++k) {
    if (cfg.propagate_attitude) {
      const auto pre = preintegrate(imu, ls_solutions[k - 1].epoch, ls_solutions[k].epoch, ImuBias{}, noise);
      relative[k] = orthonormalize(relative[k - 1] * pre.delta_R);
    }
  }

  const GeodeticCoord first = ecef_to_geodetic(ls_solutions.front().position);
  double yaw = 0.0;
  if (cfg.initial_yaw) {
    yaw = *cfg.initial_yaw;
  } else if (const auto fit = fit_heading(ls_solutions, imu, noise, lever, relative,
                                          static_cast<std::size_t>(std::max(cfg.align_window, 3)))) {
    yaw = fit->yaw;
    if (cfg.velocity != VelocityInit::kZero) states[0].velocity = fit->velocity;
  }
  const Rotation R0 = body_to_ecef(first, 0.0, 0.0, yaw);
  for (std::size_t k = 0; k < k_states; ++k) {
    states[k].rotation = orthonormalize(R0 * relative[k]);
    states[k].position = ls_solutions[k].position - states[k].rotation * lever;
  }
  return states;
}

PriorFactor make_prior(const NavState& target, const LsSolution& first_fix, const PriorConfig& cfg) {
  using namespace tangent;
  PriorFactor prior;
  prior.target = target;
  prior.covariance.setZero();
  // Local-level attitude sigmas mapped to the body-frame right perturbation.
  const Mat3 body_to_enu = enu_rotation(ecef_to_geodetic(target.position)) * target.rotation;
  const Vec3 level_var(cfg.roll_pitch_sigma * cfg.roll_pitch_sigma, cfg.roll_pitch_sigma * cfg.roll_pitch_sigma,
                       cfg.yaw_sigma * cfg.yaw_sigma);
  prior.covariance.block<3, 3>(kRot, kRot) = body_to_enu.transpose() * level_var.asDiagonal() * body_to_enu;
  prior.covariance.block<3, 3>(kPos, kPos) = position_factor_covariance(first_fix, cfg.position_floor_sigma);
  prior.covariance.block<3, 3>(kVel, kVel) = cfg.velocity_sigma * cfg.velocity_sigma * Mat3::Identity();
  prior.covariance.block<3, 3>(kBa, kBa) = cfg.accel_bias_sigma * cfg.accel_bias_sigma * Mat3::Identity();
  prior.covariance.block<3, 3>(kBg, kBg) = cfg.gyro_bias_sigma * cfg.gyro_bias_sigma * Mat3::Identity();
  prior.covariance = 0.5 * (prior.covariance + prior.covariance.transpose());
  return prior;
}

}  // namespace plnav
