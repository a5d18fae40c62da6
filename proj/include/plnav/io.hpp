#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "plnav/graph.hpp"
#include "plnav/pseudorange.hpp"
#include "plnav/sim.hpp"

namespace plnav::io {

namespace fs = std::filesystem;

// Scenario config (YAML). Unknown keys are rejected with the offending path.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig read_config(const fs::path& path);
std::string emit_config(const ScenarioConfig& cfg);

/// One row of rover_obs.csv / base_obs.csv.
struct ObsRow {
  double epoch = 0.0;
  std::string tx_id;
  TransmitterKind kind = TransmitterKind::kGnssSatellite;
  double range = 0.0;
  double sigma = 1.0;
};

/// One row of transmitters.csv.
struct TransmitterRow {
  double epoch = 0.0;
  TransmitterState tx;
};

std::string imu_csv(std::span<const ImuSample> imu);
std::vector<ImuSample> parse_imu_csv(const std::string& text);

std::string obs_csv(std::span<const ObsRow> rows);
std::vector<ObsRow> parse_obs_csv(const std::string& text);

std::string transmitters_csv(std::span<const TransmitterRow> rows);
std::vector<TransmitterRow> parse_transmitters_csv(const std::string& text);

/// Truth samples; attitude stored as a unit quaternion (w, x, y, z).
std::string truth_csv(std::span<const NavState> states);
std::vector<NavState> parse_truth_csv(const std::string& text);

std::string ls_csv(std::span<const LsSolution> sols);
std::vector<LsSolution> parse_ls_csv(const std::string& text);

/// State rows with roll/pitch/yaw in the ENU frame of `origin`.
std::string solution_csv(std::span<const NavState> states, const GeodeticCoord& origin);
std::vector<NavState> parse_solution_csv(const std::string& text, const GeodeticCoord& origin);

std::string cost_log_csv(const OptimizationResult& result);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

/// Dataset directory contents as written by `simulate`.
struct Dataset {
  ScenarioConfig config;
  Vec3 base_position = Vec3::Zero();
  std::vector<ImuSample> imu;
  std::vector<EpochObservations> epochs;
  std::vector<NavState> truth;
};

/// Writes scenario.yaml, imu.csv, rover_obs.csv, base_obs.csv,
/// transmitters.csv and truth.csv. Returns the written file names.
std::vector<std::string> write_dataset(const fs::path& dir, const SimulatedDataset& ds);

/// Reads a dataset directory; throws kEpochMismatch when an observation
/// references a transmitter missing from transmitters.csv at that epoch.
Dataset read_dataset(const fs::path& dir);

/// Creates or extends manifest.json: `files` entries are merged under
/// "files", the command is appended to "commands", and "updated" carries
/// the only timestamp.
void update_manifest(const fs::path& path, const std::string& command, const ScenarioConfig& cfg,
                     const std::string& config_path, const std::map<std::string, std::string>& files);

}  // namespace plnav::io
