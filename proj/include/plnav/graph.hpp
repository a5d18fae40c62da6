#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "plnav/frames.hpp"
#include "plnav/imu_preintegration.hpp"
#include "plnav/nav_state.hpp"
#include "plnav/pseudorange.hpp"

namespace plnav {

using Mat15 = Eigen::Matrix<double, 15, 15>;

struct PriorFactor {
  NavState target;
  Mat15 covariance = Mat15::Identity();
};

struct ImuFactor {
  std::size_t i = 0;
  std::size_t j = 1;
  PreintegratedImu pre;
  Vec3 gravity = Vec3::Zero();  // held constant over the interval
};

struct BiasFactor {
  std::size_t i = 0;
  std::size_t j = 1;
  Mat3 accel_covariance = Mat3::Identity();
  Mat3 gyro_covariance = Mat3::Identity();
};

struct PositionFactor {
  std::size_t index = 0;
  Vec3 measurement = Vec3::Zero();  // antenna position, ECEF
  Mat3 covariance = Mat3::Identity();
  Vec3 lever = Vec3::Zero();        // body frame
};

using Factor = std::variant<PriorFactor, ImuFactor, BiasFactor, PositionFactor>;

std::string_view factor_name(const Factor& f);

/// State nodes are indexed 0..num_states-1. Binary factors connect
/// consecutive nodes only, which makes the normal matrix block tridiagonal.
struct FactorGraph {
  std::size_t num_states = 0;
  std::vector<Factor> factors;

  /// Throws NavError(kInvalidInput) on out-of-range or non-consecutive
  /// indices, non-SPD covariances, or a state touched by no factor.
  void validate() const;

  std::size_t count(std::string_view name) const;
};

Vec15 prior_residual(const NavState& s, const PriorFactor& f);
Vec3 position_residual(const NavState& s, const PositionFactor& f);
std::pair<Vec3, Vec3> bias_residual(const NavState& s_i, const NavState& s_j);

/// Whitened residual and whitened Jacobian blocks of one factor.
struct FactorLinearization {
  Eigen::VectorXd residual;
  std::vector<std::pair<std::size_t, Eigen::Matrix<double, Eigen::Dynamic, 15>>> blocks;
};

Eigen::VectorXd whitened_residual(const Factor& f, std::span<const NavState> states);
FactorLinearization linearize(const Factor& f, std::span<const NavState> states);

/// Sum of squared Mahalanobis norms over all factors, accumulated in factor
/// order.
double total_cost(const FactorGraph& graph, std::span<const NavState> states);

struct OptimizerConfig {
  int max_iterations = 50;
  double initial_lambda = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  double max_lambda = 1e12;
  double cost_tolerance = 1e-12;  // relative decrease
  double step_tolerance = 1e-6;   // norm of the tangent step

  void validate() const;
};

struct IterationLog {
  int iteration = 0;
  double cost = 0.0;      // cost after this iteration (unchanged if rejected)
  double lambda = 0.0;
  double step_norm = 0.0;
  bool accepted = false;
};

struct FactorReport {
  std::string type;
  std::size_t first_index = 0;
  double cost = 0.0;           // squared Mahalanobis norm
  double residual_norm = 0.0;  // unwhitened
};

struct OptimizationResult {
  std::vector<NavState> states;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<IterationLog> log;
  std::vector<FactorReport> factor_report;

  /// Costs of the initial point followed by every accepted iteration.
  std::vector<double> accepted_costs() const;
};

/// Solves (H + lambda diag(H)) x = b for a block-tridiagonal H given by its
/// 15x15 diagonal and super-diagonal blocks. Returns nullopt when a pivot
/// block is not positive definite.
std::optional<Eigen::VectorXd> solve_block_tridiagonal(std::span<const Mat15> diagonal,
                                                       std::span<const Mat15> upper,
                                                       const Eigen::VectorXd& rhs);

/// Levenberg-Marquardt on the retraction manifold. Only cost-decreasing
/// steps are accepted.
OptimizationResult solve(const FactorGraph& graph, std::span<const NavState> initial_states,
                         const OptimizerConfig& cfg);

struct GraphBuildOptions {
  double sigma_p_floor = 0.5;          // m, floor on the diagonal of Σ^P
  double fixed_sigma_p = 0.0;          // m, > 0 replaces Σ^P by sigma^2 I
  std::optional<Vec3> gravity_override;  // otherwise gravity at node i
};

/// One node per LS epoch, a position factor per node, IMU and bias factors
/// between consecutive nodes, and `prior` on node 0. `initial_states`
/// supplies the bias linearization points and gravity evaluation points.
FactorGraph build_graph(std::span<const LsSolution> ls_solutions, std::span<const ImuSample> imu,
                        const ImuNoiseParams& noise, const PriorFactor& prior, const Vec3& lever,
                        std::span<const NavState> initial_states, const GraphBuildOptions& options = {});

enum class VelocityInit { kCentralDifference, kZero };

struct InitConfig {
  VelocityInit velocity = VelocityInit::kCentralDifference;
  std::optional<double> initial_yaw;  // rad from East; otherwise fitted
  int align_window = 10;              // epochs fitted for the initial heading
  bool propagate_attitude = true;     // chain gyro deltas from node 0
};

std::vector<NavState> initialize_states(std::span<const LsSolution> ls_solutions,
                                        std::span<const ImuSample> imu, const ImuNoiseParams& noise,
                                        const Vec3& lever, const InitConfig& cfg = {});

struct PriorConfig {
  double velocity_sigma = 1.0;      // m/s
  double roll_pitch_sigma = 0.1;    // rad
  double yaw_sigma = 0.5;           // rad
  double accel_bias_sigma = 0.05;   // m/s^2
  double gyro_bias_sigma = 5e-3;    // rad/s
  double position_floor_sigma = 0.5;  // m
};

/// Prior on `target` with position covariance from the first LS fix and
/// attitude sigmas given in the local level frame.
PriorFactor make_prior(const NavState& target, const LsSolution& first_fix, const PriorConfig& cfg = {});

}  // namespace plnav
