#pragma once

#include <span>
#include <string>
#include <vector>

#include "plnav/graph.hpp"
#include "plnav/metrics.hpp"
#include "plnav/pseudorange.hpp"
#include "plnav/sim.hpp"

namespace plnav {

/// Epoch-wise single-differenced LS. Each epoch starts from the previous
/// converged fix, or from `base_position` before the first one. Epochs with
/// fewer than four matched observations, or singular geometry, are returned
/// with converged = false instead of throwing.
std::vector<LsSolution> run_ls(std::span<const EpochObservations> epochs, const Vec3& base_position,
                               const LsConfig& base_cfg = {});

struct FgoOptions {
  OptimizerConfig optimizer;
  GraphBuildOptions graph;
  InitConfig init;
  PriorConfig prior;
};

struct FgoOutput {
  std::vector<LsSolution> used;  // converged LS fixes, one per state node
  std::vector<NavState> initial_states;
  FactorGraph graph;
  OptimizationResult result;
};

/// Builds and solves the loosely coupled graph over the converged LS fixes.
FgoOutput run_fgo(std::span<const LsSolution> ls, std::span<const ImuSample> imu, const ImuNoiseParams& noise,
                  const Vec3& lever, const FgoOptions& options = {});

/// Body-point positions of LS fixes: antenna minus the lever arm rotated by
/// the truth attitude at each epoch.
std::vector<TimedPosition> ls_body_positions(std::span<const LsSolution> ls, const GroundTruth& truth,
                                             const Vec3& lever);
std::vector<TimedPosition> state_positions(std::span<const NavState> states);

struct ScenarioRun {
  std::string label;
  std::uint64_t seed = 0;
  std::vector<LsSolution> ls;
  FgoOutput fgo;
  ErrorReport ls_report;
  ErrorReport fgo_report;
};

/// Simulate, solve LS and FGO, and evaluate both against truth.
ScenarioRun run_scenario(const ScenarioConfig& cfg, const FgoOptions& options = {});

struct ScenarioSummary {
  std::string label;
  int runs = 0;
  int fgo_better_3d = 0;           // runs with FGO 3D MAE < LS 3D MAE
  double mean_improvement_3d = 0.0;  // mean of per-run percentages
  double mean_improvement_2d = 0.0;
  ErrorReport ls;   // per-run statistics averaged over runs
  ErrorReport fgo;
  int lm_violations = 0;  // runs whose accepted costs did not strictly decrease
};

/// Runs every config with seeds seed0, seed0 + 1, ... and averages the
/// reports in seed order.
std::vector<ScenarioSummary> monte_carlo(std::span<const ScenarioConfig> configs, int runs, std::uint64_t seed0,
                                         const FgoOptions& options = {});

/// LS and FGO rows for each summary, in order.
std::vector<ErrorReport> table_rows(std::span<const ScenarioSummary> summaries);

}  // namespace plnav
