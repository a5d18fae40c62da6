#include "plnav/io.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "plnav/error.hpp"

namespace plnav::io {
namespace {

constexpr const char* kToolVersion = "0.1.0";

// ---- YAML ---------------------------------------------------------------

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw NavError(ErrorCode::kConfig, "field '" + path + "': " + what);
}

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) bad_field(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) bad_field(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <class T>
void read_scalar(const YAML::Node& node, const std::string& key, const std::string& path, T& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    bad_field(path.empty() ? key : path + "." + key, "wrong type");
  }
}

Vec3 as_vec3(const YAML::Node& v, const std::string& path) {
  if (!v.IsSequence() || v.size() != 3) bad_field(path, "expected a list of 3 numbers");
  Vec3 out;
  try {
    for (int i = 0; i < 3; ++i) out[i] = v[i].as<double>();
  } catch (const YAML::Exception&) {
    bad_field(path, "expected a list of 3 numbers");
  }
  return out;
}

void read_vec3(const YAML::Node& node, const std::string& key, const std::string& path, Vec3& out) {
  if (node[key]) out = as_vec3(node[key], path.empty() ? key : path + "." + key);
}

// Shortest representation that reads back to the same double.
YAML::Node real(double v) { return YAML::Node(fmt::format("{}", v)); }

YAML::Node vec3_node(const Vec3& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (int i = 0; i < 3; ++i) n.push_back(real(v[i]));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

// ---- CSV ----------------------------------------------------------------

std::string num(double v) { return fmt::format("{}", v); }

class CsvReader {
 public:
  CsvReader(const std::string& text, std::string_view expected_header, std::string name)
      : in_(text), name_(std::move(name)) {
    std::string header;
    if (!std::getline(in_, header) || header != expected_header) {
      throw NavError(ErrorCode::kIo, name_ + ": expected header '" + std::string(expected_header) + "'");
    }
    columns_ = static_cast<std::size_t>(std::count(expected_header.begin(), expected_header.end(), ',')) + 1;
  }

  bool next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      cells_.clear();
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells_.push_back(cell);
      if (!line.empty() && line.back() == ',') cells_.emplace_back();
      if (cells_.size() != columns_) {
        fail(fmt::format("expected {} fields, got {}", columns_, cells_.size()));
      }
      return true;
    }
    return false;
  }

  double number(std::size_t i) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(cells_[i], &used);
      if (used != cells_[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail(fmt::format("field {} is not a number", i + 1));
    }
  }

  const std::string& text(std::size_t i) const { return cells_[i]; }

  Vec3 vec3(std::size_t i) const { return {number(i), number(i + 1), number(i + 2)}; }

  [[noreturn]] void fail(const std::string& what) const {
    throw NavError(ErrorCode::kIo, fmt::format("{} line {}: {}", name_, line_no_ + 1, what));
  }

 private:
  std::istringstream in_;
  std::string name_;
  std::size_t columns_ = 0;
  std::size_t line_no_ = 0;
  std::vector<std::string> cells_;
};

constexpr const char* kImuHeader = "t,wx,wy,wz,ax,ay,az";
constexpr const char* kObsHeader = "epoch,tx_id,kind,range,sigma";
constexpr const char* kTxHeader = "epoch,tx_id,kind,x,y,z,clock";
constexpr const char* kTruthHeader = "t,x,y,z,vx,vy,vz,qw,qx,qy,qz";
constexpr const char* kLsHeader =
    "epoch,x,y,z,clock,pdop,hdop,vdop,converged,num_obs,iterations,"
    "cxx,cxy,cxz,cyx,cyy,cyz,czx,czy,czz";
constexpr const char* kSolutionHeader =
    "epoch,x,y,z,vx,vy,vz,roll,pitch,yaw,bax,bay,baz,bgx,bgy,bgz";

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw NavError(ErrorCode::kConfig, std::string("config is not valid YAML: ") + e.what());
  }
  check_keys(root, "",
             {"name", "seed", "duration", "gnss_epoch_rate", "imu_rate", "origin", "trajectory", "satellites",
              "pseudolites", "base_enu", "lever_arm", "pr_sigma", "pr_bias_sigma", "pr_bias_tau",
              "clock_walk_sigma", "elevation_mask", "inject_noise", "imu_noise", "initial_bias"});
  ScenarioConfig cfg;
  read_scalar(root, "name", "", cfg.name);
  read_scalar(root, "seed", "", cfg.seed);
  read_scalar(root, "duration", "", cfg.duration);
  read_scalar(root, "gnss_epoch_rate", "", cfg.gnss_epoch_rate);
  read_scalar(root, "imu_rate", "", cfg.imu_rate);
  if (const auto o = root["origin"]) {
    check_keys(o, "origin", {"latitude", "longitude", "height"});
    read_scalar(o, "latitude", "origin", cfg.origin.latitude);
    read_scalar(o, "longitude", "origin", cfg.origin.longitude);
    read_scalar(o, "height", "origin", cfg.origin.height);
  }
  if (const auto t = root["trajectory"]) {
    if (!t.IsMap() || !t["type"]) bad_field("trajectory.type", "required");
    const auto type = t["type"].as<std::string>();
    if (type == "circle") {
      check_keys(t, "trajectory", {"type", "radius", "speed"});
      CircleTrajectory c;
      read_scalar(t, "radius", "trajectory", c.radius);
      read_scalar(t, "speed", "trajectory", c.speed);
      cfg.trajectory = c;
    } else if (type == "figure_eight") {
      check_keys(t, "trajectory", {"type", "scale", "period"});
      FigureEightTrajectory f;
      read_scalar(t, "scale", "trajectory", f.scale);
      read_scalar(t, "period", "trajectory", f.period);
      cfg.trajectory = f;
    } else if (type == "straight_line") {
      check_keys(t, "trajectory", {"type", "speed", "heading"});
      StraightLineTrajectory s;
      read_scalar(t, "speed", "trajectory", s.speed);
      read_scalar(t, "heading", "trajectory", s.heading);
      cfg.trajectory = s;
    } else {
      bad_field("trajectory.type", "must be circle, figure_eight or straight_line");
    }
  }
  if (const auto sats = root["satellites"]) {
    if (!sats.IsSequence()) bad_field("satellites", "expected a list");
    for (std::size_t i = 0; i < sats.size(); ++i) {
      const std::string p = "satellites[" + std::to_string(i) + "]";
      check_keys(sats[i], p, {"id", "azimuth", "elevation", "range", "clock_offset"});
      SatelliteSpec s;
      read_scalar(sats[i], "id", p, s.id);
      read_scalar(sats[i], "azimuth", p, s.azimuth);
      read_scalar(sats[i], "elevation", p, s.elevation);
      read_scalar(sats[i], "range", p, s.range);
      read_scalar(sats[i], "clock_offset", p, s.clock_offset);
      cfg.satellites.push_back(s);
    }
  }
  if (const auto pls = root["pseudolites"]) {
    if (!pls.IsSequence()) bad_field("pseudolites", "expected a list");
    for (std::size_t i = 0; i < pls.size(); ++i) {
      const std::string p = "pseudolites[" + std::to_string(i) + "]";
      check_keys(pls[i], p, {"id", "enu", "clock_offset"});
      PseudoliteSpec s;
      read_scalar(pls[i], "id", p, s.id);
      read_vec3(pls[i], "enu", p, s.enu);
      read_scalar(pls[i], "clock_offset", p, s.clock_offset);
      cfg.pseudolites.push_back(s);
    }
  }
  read_vec3(root, "base_enu", "", cfg.base_enu);
  read_vec3(root, "lever_arm", "", cfg.lever_arm);
  read_scalar(root, "pr_sigma", "", cfg.pr_sigma);
  read_scalar(root, "pr_bias_sigma", "", cfg.pr_bias_sigma);
  read_scalar(root, "pr_bias_tau", "", cfg.pr_bias_tau);
  read_scalar(root, "clock_walk_sigma", "", cfg.clock_walk_sigma);
  read_scalar(root, "elevation_mask", "", cfg.elevation_mask);
  read_scalar(root, "inject_noise", "", cfg.inject_noise);
  if (const auto n = root["imu_noise"]) {
    check_keys(n, "imu_noise", {"gyro_noise_density", "accel_noise_density", "gyro_bias_walk", "accel_bias_walk"});
    read_scalar(n, "gyro_noise_density", "imu_noise", cfg.noise.gyro_noise_density);
    read_scalar(n, "accel_noise_density", "imu_noise", cfg.noise.accel_noise_density);
    read_scalar(n, "gyro_bias_walk", "imu_noise", cfg.noise.gyro_bias_walk);
    read_scalar(n, "accel_bias_walk", "imu_noise", cfg.noise.accel_bias_walk);
  }
  if (const auto b = root["initial_bias"]) {
    check_keys(b, "initial_bias", {"accel", "gyro"});
    read_vec3(b, "accel", "initial_bias", cfg.initial_bias.accel);
    read_vec3(b, "gyro", "initial_bias", cfg.initial_bias.gyro);
  }
  cfg.noise.sample_rate = cfg.imu_rate;
  cfg.validate();
  return cfg;
}

ScenarioConfig read_config(const fs::path& path) {
  if (!fs::exists(path)) throw NavError(ErrorCode::kIo, "config not found: " + path.string());
  return parse_config(read_text(path));
}

std::string emit_config(const ScenarioConfig& cfg) {
  YAML::Emitter out;
  YAML::Node root;
  root["name"] = cfg.name;
  root["seed"] = cfg.seed;
  root["duration"] = real(cfg.duration);
  root["gnss_epoch_rate"] = real(cfg.gnss_epoch_rate);
  root["imu_rate"] = real(cfg.imu_rate);
  root["origin"]["latitude"] = real(cfg.origin.latitude);
  root["origin"]["longitude"] = real(cfg.origin.longitude);
  root["origin"]["height"] = real(cfg.origin.height);
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, CircleTrajectory>) {
          root["trajectory"]["type"] = "circle";
          root["trajectory"]["radius"] = real(t.radius);
          root["trajectory"]["speed"] = real(t.speed);
        } else if constexpr (std::is_same_v<T, FigureEightTrajectory>) {
          root["trajectory"]["type"] = "figure_eight";
          root["trajectory"]["scale"] = real(t.scale);
          root["trajectory"]["period"] = real(t.period);
        } else {
          root["trajectory"]["type"] = "straight_line";
          root["trajectory"]["speed"] = real(t.speed);
          root["trajectory"]["heading"] = real(t.heading);
        }
      },
      cfg.trajectory);
  root["satellites"] = YAML::Node(YAML::NodeType::Sequence);
  for (const auto& s : cfg.satellites) {
    YAML::Node n;
    n["id"] = s.id;
    n["azimuth"] = real(s.azimuth);
    n["elevation"] = real(s.elevation);
    n["range"] = real(s.range);
    n["clock_offset"] = real(s.clock_offset);
    root["satellites"].push_back(n);
  }
  root["pseudolites"] = YAML::Node(YAML::NodeType::Sequence);
  for (const auto& p : cfg.pseudolites) {
    YAML::Node n;
    n["id"] = p.id;
    n["enu"] = vec3_node(p.enu);
    n["clock_offset"] = real(p.clock_offset);
    root["pseudolites"].push_back(n);
  }
  root["base_enu"] = vec3_node(cfg.base_enu);
  root["lever_arm"] = vec3_node(cfg.lever_arm);
  root["pr_sigma"] = real(cfg.pr_sigma);
  root["pr_bias_sigma"] = real(cfg.pr_bias_sigma);
  root["pr_bias_tau"] = real(cfg.pr_bias_tau);
  root["clock_walk_sigma"] = real(cfg.clock_walk_sigma);
  root["elevation_mask"] = real(cfg.elevation_mask);
  root["inject_noise"] = cfg.inject_noise;
  root["imu_noise"]["gyro_noise_density"] = real(cfg.noise.gyro_noise_density);
  root["imu_noise"]["accel_noise_density"] = real(cfg.noise.accel_noise_density);
  root["imu_noise"]["gyro_bias_walk"] = real(cfg.noise.gyro_bias_walk);
  root["imu_noise"]["accel_bias_walk"] = real(cfg.noise.accel_bias_walk);
  root["initial_bias"]["accel"] = vec3_node(cfg.initial_bias.accel);
  root["initial_bias"]["gyro"] = vec3_node(cfg.initial_bias.gyro);
  out << root;
  return std::string(out.c_str()) + "\n";
}

std::string imu_csv(std::span<const ImuSample> imu) {
  std::string out = std::string(kImuHeader) + "\n";
  for (const auto& s : imu) {
    out += fmt::format("{},{},{},{},{},{},{}\n", num(s.t), num(s.gyro.x()), num(s.gyro.y()), num(s.gyro.z()),
                       num(s.accel.x()), num(s.accel.y()), num(s.accel.z()));
  }
  return out;
}

std::vector<ImuSample> parse_imu_csv(const std::string& text) {
  CsvReader r(text, kImuHeader, "imu.csv");
  std::vector<ImuSample> out;
  while (r.next()) out.push_back({r.number(0), r.vec3(1), r.vec3(4)});
  return out;
}

std::string obs_csv(std::span<const ObsRow> rows) {
  std::string out = std::string(kObsHeader) + "\n";
  for (const auto& o : rows) {
    out += fmt::format("{},{},{},{},{}\n", num(o.epoch), o.tx_id, to_string(o.kind), num(o.range), num(o.sigma));
  }
  return out;
}

std::vector<ObsRow> parse_obs_csv(const std::string& text) {
  CsvReader r(text, kObsHeader, "obs csv");
  std::vector<ObsRow> out;
  while (r.next()) {
    ObsRow o;
    o.epoch = r.number(0);
    o.tx_id = r.text(1);
    try {
      o.kind = transmitter_kind_from_string(r.text(2));
    } catch (const NavError& e) {
      r.fail(e.what());
    }
    o.range = r.number(3);
    o.sigma = r.number(4);
    out.push_back(o);
  }
  return out;
}

std::string transmitters_csv(std::span<const TransmitterRow> rows) {
  std::string out = std::string(kTxHeader) + "\n";
  for (const auto& t : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", num(t.epoch), t.tx.id, to_string(t.tx.kind), num(t.tx.position.x()),
                       num(t.tx.position.y()), num(t.tx.position.z()), num(t.tx.clock_offset));
  }
  return out;
}

std::vector<TransmitterRow> parse_transmitters_csv(const std::string& text) {
  CsvReader r(text, kTxHeader, "transmitters.csv");
  std::vector<TransmitterRow> out;
  while (r.next()) {
    TransmitterRow t;
    t.epoch = r.number(0);
    t.tx.id = r.text(1);
    try {
      t.tx.kind = transmitter_kind_from_string(r.text(2));
    } catch (const NavError& e) {
      r.fail(e.what());
    }
    t.tx.position = r.vec3(3);
    t.tx.clock_offset = r.number(6);
    out.push_back(t);
  }
  return out;
}

std::string truth_csv(std::span<const NavState> states) {
  std::string out = std::string(kTruthHeader) + "\n";
  for (const auto& s : states) {
    const auto q = quaternion_from_rotation(s.rotation);
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", num(s.epoch), num(s.position.x()), num(s.position.y()),
                       num(s.position.z()), num(s.velocity.x()), num(s.velocity.y()), num(s.velocity.z()), num(q.w()),
                       num(q.x()), num(q.y()), num(q.z()));
  }
  return out;
}

std::vector<NavState> parse_truth_csv(const std::string& text) {
  CsvReader r(text, kTruthHeader, "truth.csv");
  std::vector<NavState> out;
  while (r.next()) {
    NavState s;
    s.epoch = r.number(0);
    s.position = r.vec3(1);
    s.velocity = r.vec3(4);
    s.rotation = rotation_from_quaternion(r.number(7), r.number(8), r.number(9), r.number(10));
    out.push_back(s);
  }
  return out;
}

std::string ls_csv(std::span<const LsSolution> sols) {
  std::string out = std::string(kLsHeader) + "\n";
  for (const auto& s : sols) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}", num(s.epoch), num(s.position.x()), num(s.position.y()),
                       num(s.position.z()), num(s.clock), num(s.dop.pdop), num(s.dop.hdop), num(s.dop.vdop),
                       s.converged ? 1 : 0, s.num_observations, s.iterations);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out += "," + num(s.covariance(i, j));
    }
    out += "\n";
  }
  return out;
}

std::vector<LsSolution> parse_ls_csv(const std::string& text) {
  CsvReader r(text, kLsHeader, "ls_solutions.csv");
  std::vector<LsSolution> out;
  while (r.next()) {
    LsSolution s;
    s.epoch = r.number(0);
    s.position = r.vec3(1);
    s.clock = r.number(4);
    s.dop.pdop = r.number(5);
    s.dop.hdop = r.number(6);
    s.dop.vdop = r.number(7);
    s.converged = r.number(8) != 0.0;
    s.num_observations = static_cast<int>(r.number(9));
    s.iterations = static_cast<int>(r.number(10));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) s.covariance(i, j) = r.number(11 + 3 * i + j);
    }
    out.push_back(s);
  }
  return out;
}

std::string solution_csv(std::span<const NavState> states, const GeodeticCoord& origin) {
  std::string out = std::string(kSolutionHeader) + "\n";
  for (const auto& s : states) {
    const Vec3 rpy = roll_pitch_yaw(origin, s.rotation);
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", num(s.epoch), num(s.position.x()),
                       num(s.position.y()), num(s.position.z()), num(s.velocity.x()), num(s.velocity.y()),
                       num(s.velocity.z()), num(rpy.x()), num(rpy.y()), num(rpy.z()), num(s.bias.accel.x()),
                       num(s.bias.accel.y()), num(s.bias.accel.z()), num(s.bias.gyro.x()), num(s.bias.gyro.y()),
                       num(s.bias.gyro.z()));
  }
  return out;
}

std::vector<NavState> parse_solution_csv(const std::string& text, const GeodeticCoord& origin) {
  CsvReader r(text, kSolutionHeader, "solution.csv");
  std::vector<NavState> out;
  while (r.next()) {
    NavState s;
    s.epoch = r.number(0);
    s.position = r.vec3(1);
    s.velocity = r.vec3(4);
    const Vec3 rpy = r.vec3(7);
    s.rotation = body_to_ecef(origin, rpy.x(), rpy.y(), rpy.z());
    s.bias.accel = r.vec3(10);
    s.bias.gyro = r.vec3(13);
    out.push_back(s);
  }
  return out;
}

std::string cost_log_csv(const OptimizationResult& result) {
  std::string out = "iteration,cost,lambda,step_norm,accepted\n";
  out += fmt::format("0,{},,,1\n", num(result.initial_cost));
  for (const auto& it : result.log) {
    out += fmt::format("{},{},{},{},{}\n", it.iteration, num(it.cost), num(it.lambda), num(it.step_norm),
                       it.accepted ? 1 : 0);
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NavError(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NavError(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw NavError(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<std::string> write_dataset(const fs::path& dir, const SimulatedDataset& ds) {
  std::vector<ObsRow> rover;
  std::vector<ObsRow> base;
  std::vector<TransmitterRow> txs;
  for (const auto& e : ds.epochs) {
    std::map<std::string, TransmitterKind> kinds;
    for (const auto& t : e.transmitters) {
      kinds[t.id] = t.kind;
      txs.push_back({e.epoch, t});
    }
    for (const auto& o : e.rover) rover.push_back({o.epoch, o.transmitter_id, kinds.at(o.transmitter_id), o.range, o.sigma});
    for (const auto& o : e.base) base.push_back({o.epoch, o.transmitter_id, kinds.at(o.transmitter_id), o.range, o.sigma});
  }
  write_text(dir / "scenario.yaml", emit_config(ds.config));
  write_text(dir / "imu.csv", imu_csv(ds.imu));
  write_text(dir / "rover_obs.csv", obs_csv(rover));
  write_text(dir / "base_obs.csv", obs_csv(base));
  write_text(dir / "transmitters.csv", transmitters_csv(txs));
  write_text(dir / "truth.csv", truth_csv(ds.truth.samples()));
  return {"scenario.yaml", "imu.csv", "rover_obs.csv", "base_obs.csv", "transmitters.csv", "truth.csv"};
}

Dataset read_dataset(const fs::path& dir) {
  for (const char* f : {"scenario.yaml", "imu.csv", "rover_obs.csv", "base_obs.csv", "transmitters.csv", "truth.csv"}) {
    if (!fs::exists(dir / f)) throw NavError(ErrorCode::kIo, "dataset file missing: " + (dir / f).string());
  }
  Dataset ds;
  ds.config = read_config(dir / "scenario.yaml");
  ds.base_position = geodetic_to_ecef(ds.config.origin) + enu_rotation(ds.config.origin).transpose() * ds.config.base_enu;
  ds.imu = parse_imu_csv(read_text(dir / "imu.csv"));
  ds.truth = parse_truth_csv(read_text(dir / "truth.csv"));

  const auto rover = parse_obs_csv(read_text(dir / "rover_obs.csv"));
  const auto base = parse_obs_csv(read_text(dir / "base_obs.csv"));
  const auto txs = parse_transmitters_csv(read_text(dir / "transmitters.csv"));

  std::map<double, EpochObservations> by_epoch;
  for (const auto& t : txs) {
    auto& e = by_epoch[t.epoch];
    e.epoch = t.epoch;
    e.transmitters.push_back(t.tx);
  }
  auto attach = [&](const std::vector<ObsRow>& rows, bool is_rover) {
    for (const auto& o : rows) {
      auto it = by_epoch.find(o.epoch);
      const bool known = it != by_epoch.end() &&
                         std::any_of(it->second.transmitters.begin(), it->second.transmitters.end(),
                                     [&](const TransmitterState& t) { return t.id == o.tx_id; });
      if (!known) {
        throw NavError(ErrorCode::kEpochMismatch,
                       fmt::format("observation of '{}' at epoch {} has no transmitter entry", o.tx_id, o.epoch));
      }
      auto& list = is_rover ? it->second.rover : it->second.base;
      list.push_back({o.epoch, o.tx_id, o.range, o.sigma});
    }
  };
  attach(rover, true);
  attach(base, false);
  for (auto& [t, e] : by_epoch) ds.epochs.push_back(std::move(e));
  return ds;
}

void update_manifest(const fs::path& path, const std::string& command, const ScenarioConfig& cfg,
                     const std::string& config_path, const std::map<std::string, std::string>& files) {
  nlohmann::ordered_json j;
  if (fs::exists(path)) {
    try {
      j = nlohmann::ordered_json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
      throw NavError(ErrorCode::kIo, "manifest " + path.string() + " unreadable: " + e.what());
    }
  }
  j["tool_version"] = kToolVersion;
  j["scenario"] = cfg.name;
  if (!config_path.empty()) j["scenario_path"] = config_path;
  j["dataset_dir"] = path.parent_path().string();
  j["seed"] = cfg.seed;
  j["commands"].push_back(command);
  for (const auto& [role, file] : files) j["files"][role] = file;
  j["updated"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                         std::chrono::system_clock::now())));
  write_text(path, j.dump(2) + "\n");
}

}  // namespace plnav::io
