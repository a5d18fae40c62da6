// plnav: scenario simulation, LS and FGO solving, and evaluation.

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "plnav/error.hpp"
#include "plnav/io.hpp"
#include "plnav/metrics.hpp"
#include "plnav/pipeline.hpp"

namespace fs = std::filesystem;
using namespace plnav;

namespace {

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidInput: return 2;
    case ErrorCode::kConfig: return 3;
    case ErrorCode::kIo: return 4;
    case ErrorCode::kGeometry: return 5;
    case ErrorCode::kUnderdetermined: return 6;
    case ErrorCode::kImuGap: return 7;
    case ErrorCode::kEpochMismatch: return 8;
    case ErrorCode::kSolver: return 9;
  }
  return 1;
}

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int runs = 100;
  int max_iters = 50;
  double fixed_sigma_p = 0.0;
  std::string ls_path;
  std::string fgo_path;
  std::vector<std::string> dirs;
};

void cmd_simulate(const Options& o) {
  ScenarioConfig cfg = io::read_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  const SimulatedDataset ds = simulate(cfg);
  const fs::path dir = o.out;
  const auto files = io::write_dataset(dir, ds);
  std::map<std::string, std::string> roles;
  for (const auto& f : files) roles[fs::path(f).stem().string()] = f;
  io::update_manifest(dir / "manifest.json", "simulate", cfg, o.config, roles);
  for (const auto& n : ds.notices) fmt::print(stderr, "notice: {}\n", n);
  fmt::print("simulate: {} imu rows, {} epochs -> {}\n", ds.imu.size(), ds.epochs.size(), dir.string());
}

void cmd_solve_ls(const Options& o) {
  const fs::path dir = o.dirs.at(0);
  const io::Dataset ds = io::read_dataset(dir);
  const auto sols = run_ls(ds.epochs, ds.base_position);
  const fs::path out = o.out.empty() ? dir / "ls_solutions.csv" : fs::path(o.out);
  io::write_text(out, io::ls_csv(sols));
  io::update_manifest(dir / "manifest.json", "solve-ls", ds.config, "", {{"ls_solutions", out.string()}});
  int flagged = 0;
  for (const auto& s : sols) flagged += s.converged ? 0 : 1;
  fmt::print("solve-ls: {} epochs, {} flagged -> {}\n", sols.size(), flagged, out.string());
}

void cmd_solve_fgo(const Options& o) {
  const fs::path dir = o.dirs.at(0);
  const io::Dataset ds = io::read_dataset(dir);
  const fs::path ls_path = o.ls_path.empty() ? dir / "ls_solutions.csv" : fs::path(o.ls_path);
  const auto ls = io::parse_ls_csv(io::read_text(ls_path));

  FgoOptions opt;
  opt.optimizer.max_iterations = o.max_iters;
  opt.graph.fixed_sigma_p = o.fixed_sigma_p;
  const FgoOutput fgo = run_fgo(ls, ds.imu, ds.config.imu_noise(), ds.config.lever_arm, opt);

  const fs::path out = o.out.empty() ? dir / "solution.csv" : fs::path(o.out);
  const fs::path cost = out.parent_path() / (out.stem().string() + "_cost.csv");
  io::write_text(out, io::solution_csv(fgo.result.states, ds.config.origin));
  io::write_text(cost, io::cost_log_csv(fgo.result));
  io::update_manifest(dir / "manifest.json", "solve-fgo", ds.config, "",
                      {{"solution", out.string()}, {"cost_log", cost.string()}});
  fmt::print("solve-fgo: {} states, cost {:.6g} -> {:.6g} in {} iterations ({}) -> {}\n", fgo.result.states.size(),
             fgo.result.initial_cost, fgo.result.final_cost, fgo.result.iterations, fgo.result.message, out.string());
}

std::string epoch_list(const std::vector<double>& epochs) {
  std::string s;
  for (double e : epochs) s += (s.empty() ? "" : ", ") + fmt::format("{:g}", e);
  return s;
}

void cmd_evaluate(const Options& o) {
  std::vector<ErrorReport> rows;
  std::string errors_csv = "scenario,alg,epoch,e_east,e_north,e_up,e2d,e3d\n";
  std::string traj_csv = "scenario,alg,epoch,est_east,est_north,truth_east,truth_north\n";
  for (const auto& d : o.dirs) {
    const fs::path dir = d;
    const io::Dataset ds = io::read_dataset(dir);
    const auto ls = io::parse_ls_csv(io::read_text(dir / "ls_solutions.csv"));
    const auto states = io::parse_solution_csv(io::read_text(dir / "solution.csv"), ds.config.origin);

    std::set<double> ls_epochs;
    std::vector<TimedPosition> ls_pos;
    std::vector<DopValues> dops;
    for (const auto& s : ls) {
      if (!s.converged) continue;
      ls_epochs.insert(s.epoch);
      ls_pos.push_back({s.epoch, s.position - nearest_truth_rotation(ds.truth, s.epoch) * ds.config.lever_arm});
      dops.push_back(s.dop);
    }
    std::vector<double> misaligned;
    for (const auto& s : states) {
      if (!ls_epochs.contains(s.epoch)) misaligned.push_back(s.epoch);
    }
    if (!misaligned.empty() || states.size() != ls_epochs.size()) {
      throw NavError(ErrorCode::kEpochMismatch,
                     fmt::format("{}: solution epochs not aligned with converged LS epochs (offending: {}; {} vs {})",
                                 dir.string(), epoch_list(misaligned), states.size(), ls_epochs.size()));
    }

    const Rotation C = enu_rotation(ds.config.origin);
    const Vec3 origin = geodetic_to_ecef(ds.config.origin);
    auto emit = [&](const std::string& alg, const std::vector<TimedPosition>& est) {
      const auto err = position_errors(est, ds.truth, ds.config.origin);
      for (std::size_t i = 0; i < err.size(); ++i) {
        const auto& e = err[i];
        errors_csv += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", ds.config.name, alg, e.epoch,
                                  e.enu.x(), e.enu.y(), e.enu.z(), e.e2d, e.e3d);
        const Vec3 est_enu = C * (est[i].position - origin);
        const Vec3 truth_enu = C * (interpolate_truth(ds.truth, e.epoch) - origin);
        traj_csv += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n", ds.config.name, alg, e.epoch, est_enu.x(),
                                est_enu.y(), truth_enu.x(), truth_enu.y());
      }
      rows.push_back(summarize(err, dops, ds.config.name, alg));
    };
    emit("LS", ls_pos);
    emit("FGO", state_positions(states));
  }

  const fs::path out = o.out.empty() ? fs::path(o.dirs.front()) / "report" : fs::path(o.out);
  std::string text = render_table(rows);
  text += "\n3D MAE improvement FGO over LS:\n";
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    text += fmt::format("  {:<12} {:.1f}%\n", rows[i].label, improvement(rows[i + 1].mae_3d, rows[i].mae_3d));
  }
  io::write_text(out / "report.txt", text);
  io::write_text(out / "report.csv", render_csv(rows));
  io::write_text(out / "errors.csv", errors_csv);
  io::write_text(out / "trajectory.csv", traj_csv);
  fmt::print("{}", text);
}

void cmd_paper_table(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(1);
  auto configs = default_paper_scenarios(seed);
  if (!o.config.empty()) {
    // A config replaces the shared scenario settings; the four signal sets
    // keep their own pseudolites.
    const ScenarioConfig user = io::read_config(o.config);
    for (auto& c : configs) {
      const auto pls = c.pseudolites;
      const auto name = c.name;
      c = user;
      c.name = name;
      c.pseudolites = pls;
    }
  }
  FgoOptions opt;
  opt.optimizer.max_iterations = o.max_iters;
  opt.graph.fixed_sigma_p = o.fixed_sigma_p;
  const auto summaries = monte_carlo(configs, o.runs, seed, opt);
  const auto rows = table_rows(summaries);

  std::string text = fmt::format("{} runs per scenario, seeds {}..{}\n\n", o.runs, seed, seed + o.runs - 1);
  text += render_table(rows);
  text += "\nFGO vs LS (3D MAE):\n";
  std::string summary_csv = "signals,runs,fgo_better_3d,mean_improvement_2d,mean_improvement_3d,lm_violations\n";
  for (const auto& s : summaries) {
    text += fmt::format("  {:<12} better in {}/{} runs, mean improvement {:.1f}% (2D {:.1f}%)\n", s.label,
                        s.fgo_better_3d, s.runs, s.mean_improvement_3d, s.mean_improvement_2d);
    summary_csv += fmt::format("{},{},{},{:.2f},{:.2f},{}\n", s.label, s.runs, s.fgo_better_3d, s.mean_improvement_2d,
                               s.mean_improvement_3d, s.lm_violations);
  }
  if (!o.out.empty()) {
    const fs::path out = o.out;
    io::write_text(out / "report.txt", text);
    io::write_text(out / "report.csv", render_csv(rows));
    io::write_text(out / "summary.csv", summary_csv);
  }
  fmt::print("{}", text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudolite-aided GNSS/IMU factor graph tools"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset from a scenario config");
  sim->add_option("--config", o.config, "Scenario YAML")->required();
  sim->add_option("--out", o.out, "Output dataset directory")->required();
  sim->add_option("--seed", o.seed, "Override the config seed");

  auto* ls = app.add_subcommand("solve-ls", "Epoch-wise single-differenced LS");
  ls->add_option("dataset", o.dirs, "Dataset directory")->required()->expected(1);
  ls->add_option("--out", o.out, "Output CSV (default <dataset>/ls_solutions.csv)");

  auto* fgo = app.add_subcommand("solve-fgo", "Loosely coupled factor graph optimization");
  fgo->add_option("dataset", o.dirs, "Dataset directory")->required()->expected(1);
  fgo->add_option("--ls", o.ls_path, "LS solutions (default <dataset>/ls_solutions.csv)");
  fgo->add_option("--out", o.out, "Output CSV (default <dataset>/solution.csv)");
  fgo->add_option("--max-iters", o.max_iters, "LM iteration limit")->check(CLI::PositiveNumber);
  fgo->add_option("--fixed-sigma-p", o.fixed_sigma_p, "Isotropic position factor sigma in m (0 = LS covariance)")
      ->check(CLI::NonNegativeNumber);

  auto* ev = app.add_subcommand("evaluate", "Error report for solved datasets");
  ev->add_option("datasets", o.dirs, "Dataset directories with ls_solutions.csv and solution.csv")->required();
  ev->add_option("--out", o.out, "Report directory (default <first dataset>/report)");

  auto* table = app.add_subcommand("paper-table", "Monte Carlo comparison over the four default signal sets");
  table->add_option("--runs", o.runs, "Runs per scenario")->check(CLI::PositiveNumber);
  table->add_option("--seed", o.seed, "First seed (default 1)");
  table->add_option("--config", o.config, "Override shared scenario settings");
  table->add_option("--out", o.out, "Report directory");
  table->add_option("--max-iters", o.max_iters, "LM iteration limit")->check(CLI::PositiveNumber);
  table->add_option("--fixed-sigma-p", o.fixed_sigma_p, "Isotropic position factor sigma in m")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 64;
  }

  try {
    if (sim->parsed()) cmd_simulate(o);
    else if (ls->parsed()) cmd_solve_ls(o);
    else if (fgo->parsed()) cmd_solve_fgo(o);
    else if (ev->parsed()) cmd_evaluate(o);
    else if (table->parsed()) cmd_paper_table(o);
  } catch (const NavError& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
