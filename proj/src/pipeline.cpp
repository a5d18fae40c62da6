#include "plnav/pipeline.hpp"

#include <map>

#include "plnav/error.hpp"

namespace plnav {

std::vector<LsSolution> run_ls(std::span<const EpochObservations> epochs, const Vec3& base_position,
                               const LsConfig& base_cfg) {
  std::vector<LsSolution> out;
  out.reserve(epochs.size());
  Vec3 guess = base_position;
  for (const auto& e : epochs) {
    std::map<std::string, const PseudorangeObs*> base_by_id;
    for (const auto& b : e.base) base_by_id[b.transmitter_id] = &b;
    std::vector<SdObs> sd;
    for (const auto& r : e.rover) {
      const auto it = base_by_id.find(r.transmitter_id);
      if (it != base_by_id.end()) sd.push_back(single_difference(r, *it->second));
    }

    LsSolution sol;
    sol.epoch = e.epoch;
    sol.position = guess;
    sol.num_observations = static_cast<int>(sd.size());
    if (sd.size() >= 4) {
      LsConfig cfg = base_cfg;
      cfg.initial_guess = guess;
      cfg.base_position = base_position;
      try {
        sol = solve_ls(sd, e.transmitters, cfg);
        sol.epoch = e.epoch;
      } catch (const NavError& err) {
        if (err.code() != ErrorCode::kGeometry && err.code() != ErrorCode::kUnderdetermined) throw;
        sol.converged = false;
      }
    }
    if (sol.converged) guess = sol.position;
    out.push_back(std::move(sol));
  }
  return out;
}

FgoOutput run_fgo(std::span<const LsSolution> ls, std::span<const ImuSample> imu, const ImuNoiseParams& noise,
                  const Vec3& lever, const FgoOptions& options) {
  FgoOutput out;
  for (const auto& s : ls) {
    if (s.converged) out.used.push_back(s);
  }
  if (out.used.size() < 2) {
    throw NavError(ErrorCode::kUnderdetermined, "run_fgo: fewer than two converged LS epochs");
  }
  out.initial_states = initialize_states(out.used, imu, noise, lever, options.init);
  const PriorFactor prior = make_prior(out.initial_states.front(), out.used.front(), options.prior);
  out.graph = build_graph(out.used, imu, noise, prior, lever, out.initial_states, options.graph);
  out.result = solve(out.graph, out.initial_states, options.optimizer);
  return out;
}

std::vector<TimedPosition> ls_body_positions(std::span<const LsSolution> ls, const GroundTruth& truth,
                                             const Vec3& lever) {
  std::vector<TimedPosition> out;
  for (const auto& s : ls) {
    if (!s.converged) continue;
    out.push_back({s.epoch, s.position - truth.nearest_rotation(s.epoch) * lever});
  }
  return out;
}

std::vector<TimedPosition> state_positions(std::span<const NavState> states) {
  std::vector<TimedPosition> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back({s.epoch, s.position});
  return out;
}

namespace {

std::vector<DopValues> converged_dops(std::span<const LsSolution> ls) {
  std::vector<DopValues> out;
  for (const auto& s : ls) {
    if (s.converged) out.push_back(s.dop);
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& costs) {
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (!(costs[i] < costs[i - 1])) return false;
  }
  return true;
}

void accumulate(ErrorReport& acc, const ErrorReport& r) {
  acc.mae_2d += r.mae_2d;
  acc.max_2d += r.max_2d;
  acc.mae_3d += r.mae_3d;
  acc.max_3d += r.max_3d;
  acc.mean_pdop += r.mean_pdop;
  acc.mean_hdop += r.mean_hdop;
  acc.mean_vdop += r.mean_vdop;
}

void scale(ErrorReport& r, double s) {
  r.mae_2d *= s;
  r.max_2d *= s;
  r.mae_3d *= s;
  r.max_3d *= s;
  r.mean_pdop *= s;
  r.mean_hdop *= s;
  r.mean_vdop *= s;
}

}  // namespace

ScenarioRun run_scenario(const ScenarioConfig& cfg, const FgoOptions& options) {
  const SimulatedDataset ds = simulate(cfg);
  ScenarioRun run;
  run.label = cfg.name;
  run.seed = cfg.seed;
  run.ls = run_ls(ds.epochs, ds.base_position);
  run.fgo = run_fgo(run.ls, ds.imu, cfg.imu_noise(), cfg.lever_arm, options);

  const auto dops = converged_dops(run.ls);
  const auto ls_err = position_errors(ls_body_positions(run.ls, ds.truth, cfg.lever_arm), ds.truth, cfg.origin);
  const auto fgo_err = position_errors(state_positions(run.fgo.result.states), ds.truth, cfg.origin);
  run.ls_report = summarize(ls_err, dops, cfg.name, "LS");
  run.fgo_report = summarize(fgo_err, dops, cfg.name, "FGO");
  return run;
}

std::vector<ScenarioSummary> monte_carlo(std::span<const ScenarioConfig> configs, int runs, std::uint64_t seed0,
                                         const FgoOptions& options) {
  if (runs < 1) throw NavError(ErrorCode::kInvalidInput, "monte_carlo: runs must be >= 1");
  std::vector<ScenarioSummary> out;
  for (const auto& base : configs) {
    ScenarioSummary s;
    s.label = base.name;
    s.ls.label = s.fgo.label = base.name;
    s.ls.algorithm = "LS";
    s.fgo.algorithm = "FGO";
    for (int r = 0; r < runs; ++r) {
      ScenarioConfig cfg = base;
      cfg.seed = seed0 + static_cast<std::uint64_t>(r);
      const ScenarioRun run = run_scenario(cfg, options);
      ++s.runs;
      if (run.fgo_report.mae_3d < run.ls_report.mae_3d) ++s.fgo_better_3d;
      s.mean_improvement_3d += improvement(run.fgo_report.mae_3d, run.ls_report.mae_3d);
      s.mean_improvement_2d += improvement(run.fgo_report.mae_2d, run.ls_report.mae_2d);
      if (!strictly_decreasing(run.fgo.result.accepted_costs())) ++s.lm_violations;
      accumulate(s.ls, run.ls_report);
      accumulate(s.fgo, run.fgo_report);
    }
    const double inv = 1.0 / s.runs;
    s.mean_improvement_3d *= inv;
    s.mean_improvement_2d *= inv;
    scale(s.ls, inv);
    scale(s.fgo, inv);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ErrorReport> table_rows(std::span<const ScenarioSummary> summaries) {
  std::vector<ErrorReport> rows;
  for (const auto& s : summaries) {
    rows.push_back(s.ls);
    rows.push_back(s.fgo);
  }
  return rows;
}

}  // namespace plnav
