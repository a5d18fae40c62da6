#include "plnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "plnav/error.hpp"

namespace plnav {

namespace {

std::size_t upper_index(std::span<const NavState> truth, double t) {
  const auto it = std::upper_bound(truth.begin(), truth.end(), t,
                                   [](double v, const NavState& s) { return v < s.epoch; });
  return static_cast<std::size_t>(it - truth.begin());
}

bool in_span(std::span<const NavState> truth, double t) {
  return !truth.empty() && t >= truth.front().epoch - 1e-9 && t <= truth.back().epoch + 1e-9;
}

}  // namespace

Vec3 interpolate_truth(std::span<const NavState> truth, double t) {
  if (!in_span(truth, t)) {
    throw NavError(ErrorCode::kEpochMismatch, fmt::format("epoch {:g} outside the truth span", t));
  }
  const std::size_t hi = std::clamp<std::size_t>(upper_index(truth, t), 1, truth.size() - 1);
  if (truth.size() == 1) return truth.front().position;
  const auto& a = truth[hi - 1];
  const auto& b = truth[hi];
  const double u = std::clamp((t - a.epoch) / (b.epoch - a.epoch), 0.0, 1.0);
  return (1.0 - u) * a.position + u * b.position;
}

Rotation nearest_truth_rotation(std::span<const NavState> truth, double t) {
  if (!in_span(truth, t)) {
    throw NavError(ErrorCode::kEpochMismatch, fmt::format("epoch {:g} outside the truth span", t));
  }
  const std::size_t hi = std::min(upper_index(truth, t), truth.size() - 1);
  const std::size_t lo = hi == 0 ? 0 : hi - 1;
  return std::abs(truth[hi].epoch - t) < std::abs(t - truth[lo].epoch) ? truth[hi].rotation : truth[lo].rotation;
}

std::vector<EpochError> position_errors(std::span<const TimedPosition> estimate, std::span<const NavState> truth,
                                        const GeodeticCoord& origin) {
  std::vector<double> bad;
  for (const auto& e : estimate) {
    if (!in_span(truth, e.t)) bad.push_back(e.t);
  }
  if (!bad.empty()) {
    std::string list;
    for (double t : bad) list += (list.empty() ? "" : ", ") + fmt::format("{:g}", t);
    throw NavError(ErrorCode::kEpochMismatch, "epochs outside the truth span: " + list);
  }
  const Rotation C = enu_rotation(origin);
  std::vector<EpochError> out;
  out.reserve(estimate.size());
  for (const auto& e : estimate) {
    EpochError err;
    err.epoch = e.t;
    err.enu = C * (e.position - interpolate_truth(truth, e.t));
    err.e2d = err.enu.head<2>().norm();
    err.e3d = err.enu.norm();
    out.push_back(err);
  }
  return out;
}

std::vector<EpochError> position_errors(std::span<const TimedPosition> estimate, const GroundTruth& truth,
                                        const GeodeticCoord& origin) {
  return position_errors(estimate, std::span<const NavState>(truth.samples()), origin);
}

ErrorReport summarize(std::span<const EpochError> errors, std::span<const DopValues> dops,
                      const std::string& label, const std::string& algorithm) {
  if (errors.empty()) throw NavError(ErrorCode::kInvalidInput, "summarize: empty error series");
  ErrorReport r;
  r.label = label;
  r.algorithm = algorithm;
  for (const auto& e : errors) {
    r.epochs.push_back(e.epoch);
    r.e2d.push_back(e.e2d);
    r.e3d.push_back(e.e3d);
    r.mae_2d += e.e2d;
    r.mae_3d += e.e3d;
    r.max_2d = std::max(r.max_2d, e.e2d);
    r.max_3d = std::max(r.max_3d, e.e3d);
  }
  const auto n = static_cast<double>(errors.size());
  r.mae_2d /= n;
  r.mae_3d /= n;
  if (!dops.empty()) {
    for (const auto& d : dops) {
      r.mean_pdop += d.pdop;
      r.mean_hdop += d.hdop;
      r.mean_vdop += d.vdop;
    }
    const auto m = static_cast<double>(dops.size());
    r.mean_pdop /= m;
    r.mean_hdop /= m;
    r.mean_vdop /= m;
  }
  return r;
}

double improvement(double a, double b) {
  if (b == 0.0) throw NavError(ErrorCode::kInvalidInput, "improvement: reference value is zero");
  return (1.0 - a / b) * 100.0;
}

std::string format_cell(double v) {
  if (std::abs(v) >= 100.0) return fmt::format("{:.4g}", v);
  return fmt::format("{:.2f}", v);
}

std::string render_table(std::span<const ErrorReport> reports) {
  std::string out = fmt::format("{:<12} {:>6} {:>6} {:>6}  {:<4} {:>8} {:>8} {:>8} {:>8}\n", "Signals", "PDOP",
                                "HDOP", "VDOP", "Alg", "2D-MAE", "2D-Max", "3D-MAE", "3D-Max");
  out += std::string(out.size() - 1, '-') + "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const bool repeat = i > 0 && reports[i - 1].label == r.label;
    if (repeat) {
      out += fmt::format("{:<12} {:>6} {:>6} {:>6}  ", "", "", "", "");
    } else {
      out += fmt::format("{:<12} {:>6} {:>6} {:>6}  ", r.label, format_cell(r.mean_pdop), format_cell(r.mean_hdop),
                         format_cell(r.mean_vdop));
    }
    out += fmt::format("{:<4} {:>8} {:>8} {:>8} {:>8}\n", r.algorithm, format_cell(r.mae_2d), format_cell(r.max_2d),
                       format_cell(r.mae_3d), format_cell(r.max_3d));
  }
  return out;
}

namespace {
constexpr const char* kReportHeader = "signals,alg,pdop,hdop,vdop,mae_2d,max_2d,mae_3d,max_3d";
}

std::string render_csv(std::span<const ErrorReport> reports) {
  std::string out = std::string(kReportHeader) + "\n";
  for (const auto& r : reports) {
    out += fmt::format("{},{},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f}\n", r.label, r.algorithm, r.mean_pdop,
                       r.mean_hdop, r.mean_vdop, r.mae_2d, r.max_2d, r.mae_3d, r.max_3d);
  }
  return out;
}

std::vector<ErrorReport> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw NavError(ErrorCode::kIo, "report csv: unexpected header");
  }
  std::vector<ErrorReport> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw NavError(ErrorCode::kIo, fmt::format("report csv row {}: expected 9 fields", row));
    ErrorReport r;
    r.label = cells[0];
    r.algorithm = cells[1];
    try {
      r.mean_pdop = std::stod(cells[2]);
      r.mean_hdop = std::stod(cells[3]);
      r.mean_vdop = std::stod(cells[4]);
      r.mae_2d = std::stod(cells[5]);
      r.max_2d = std::stod(cells[6]);
      r.mae_3d = std::stod(cells[7]);
      r.max_3d = std::stod(cells[8]);
    } catch (const std::exception&) {
      throw NavError(ErrorCode::kIo, fmt::format("report csv row {}: bad number", row));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace plnav
