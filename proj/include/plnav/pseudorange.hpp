#pragma once

#include <span>
#include <string>
#include <vector>

#include "plnav/frames.hpp"

namespace plnav {

enum class TransmitterKind { kGnssSatellite, kPseudolite };

std::string_view to_string(TransmitterKind kind);
TransmitterKind transmitter_kind_from_string(std::string_view s);

struct TransmitterState {
  std::string id;
  TransmitterKind kind = TransmitterKind::kGnssSatellite;
  Vec3 position = Vec3::Zero();  // ECEF, m
  double clock_offset = 0.0;     // m
};

struct PseudorangeObs {
  double epoch = 0.0;  // s
  std::string transmitter_id;
  double range = 0.0;  // m
  double sigma = 1.0;  // m
};

/// Rover-minus-base pseudorange for one transmitter.
struct SdObs {
  double epoch = 0.0;
  std::string transmitter_id;
  double sd_range = 0.0;
  double sigma = 1.0;
};

struct DopValues {
  double pdop = 0.0;
  double hdop = 0.0;
  double vdop = 0.0;
  double gdop = 0.0;
};

struct LsConfig {
  int max_iterations = 20;
  double step_tolerance = 1e-6;  // m
  Vec3 initial_guess = Vec3::Zero();
  Vec3 base_position = Vec3::Zero();
};

struct LsSolution {
  double epoch = 0.0;
  Vec3 position = Vec3::Zero();  // antenna, ECEF
  double clock = 0.0;            // differential receiver clock, m
  Mat3 covariance = Mat3::Zero();
  DopValues dop;
  int iterations = 0;
  bool converged = false;
  int num_observations = 0;
  // Weighted cost sum(((sd - predicted) / sigma)^2) after each accepted step,
  // starting with the initial guess.
  std::vector<double> cost_history;
};

/// Geometric range plus receiver clock minus transmitter clock.
double predict_pseudorange(const TransmitterState& tx, const Vec3& rx_position, double rx_clock);

SdObs single_difference(const PseudorangeObs& rover, const PseudorangeObs& base);

/// Epoch-wise Gauss-Newton fix on (antenna position, differential clock).
///
/// Every observation must name a transmitter in `txs`. Throws kUnderdetermined
/// for fewer than four observations and kGeometry when the normal matrix has
/// condition number above 1e12. Non-convergence is reported through
/// LsSolution::converged with the last iterate.
LsSolution solve_ls(std::span<const SdObs> obs, std::span<const TransmitterState> txs,
                    const LsConfig& cfg);

/// DOPs for the rows [-u^T, 1] of the line-of-sight geometry at p.
DopValues compute_dop(std::span<const TransmitterState> txs, const Vec3& p);

/// Σ^P for the position factor: the LS covariance with its diagonal floored
/// at floor_sigma^2, or a fixed isotropic sigma^2 when fixed_sigma > 0.
Mat3 position_factor_covariance(const LsSolution& sol, double floor_sigma = 0.5,
                                double fixed_sigma = 0.0);

}  // namespace plnav
