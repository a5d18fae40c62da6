#pragma once

#include <span>
#include <string>
#include <vector>

#include "plnav/frames.hpp"
#include "plnav/pseudorange.hpp"
#include "plnav/sim.hpp"

namespace plnav {

struct TimedPosition {
  double t = 0.0;
  Vec3 position = Vec3::Zero();  // body point, ECEF
};

struct EpochError {
  double epoch = 0.0;
  Vec3 enu = Vec3::Zero();  // estimate minus truth
  double e2d = 0.0;
  double e3d = 0.0;
};

struct ErrorReport {
  std::string label;
  std::string algorithm;
  std::vector<double> epochs;
  std::vector<double> e2d;
  std::vector<double> e3d;
  double mae_2d = 0.0;
  double max_2d = 0.0;
  double mae_3d = 0.0;
  double max_3d = 0.0;
  double mean_pdop = 0.0;
  double mean_hdop = 0.0;
  double mean_vdop = 0.0;
};

/// Errors in the ENU frame of `origin`; truth is interpolated linearly to
/// each estimate epoch. Throws kEpochMismatch outside the truth span.
std::vector<EpochError> position_errors(std::span<const TimedPosition> estimate, const GroundTruth& truth,
                                        const GeodeticCoord& origin);

/// Same, against truth samples sorted by epoch.
std::vector<EpochError> position_errors(std::span<const TimedPosition> estimate, std::span<const NavState> truth,
                                        const GeodeticCoord& origin);

/// Linear position interpolation over sorted samples; throws kEpochMismatch
/// outside their span.
Vec3 interpolate_truth(std::span<const NavState> truth, double t);
Rotation nearest_truth_rotation(std::span<const NavState> truth, double t);

/// Throws kInvalidInput on an empty series. `dops` may be empty, in which
/// case the DOP means are zero.
ErrorReport summarize(std::span<const EpochError> errors, std::span<const DopValues> dops,
                      const std::string& label, const std::string& algorithm = "");

/// Percentage reduction of `a` relative to `b`: (1 - a / b) * 100.
double improvement(double a, double b);

/// Fixed-width table, one row per report. Reports sharing a label in
/// consecutive rows print the signal set and DOPs once.
std::string render_table(std::span<const ErrorReport> reports);

/// Numeric table cell: two decimals, or four significant figures at 100 and
/// above.
std::string format_cell(double v);

/// Header plus one row per report; all values with two decimals.
std::string render_csv(std::span<const ErrorReport> reports);
std::vector<ErrorReport> parse_report_csv(const std::string& text);

}  // namespace plnav
