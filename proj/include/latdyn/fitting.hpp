#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "latdyn/sim.hpp"
#include "latdyn/vehicle_model.hpp"

namespace latdyn {

/// One (slip angle, normalized force) observation for the curve fit.
struct ForceSample {
  double alpha = 0.0;   // rad
  double dy = 0.0;      // dimensionless
  double weight = 1.0;  // > 0
};

struct ExtractOptions {
  double fz_floor = 200.0;        // N; rows with smaller axle load are dropped
  double prefilter_cutoff_hz = 5.0;  // 0 disables the Butterworth prefilter
  std::size_t min_samples = 20;
};

struct AxleForceSamples {
  std::vector<ForceSample> front;
  std::vector<ForceSample> rear;
};

/// Reconstructs per-axle (alpha, Dy) samples from a truth-schema log by
/// inverting the slip, load and force-balance equations. The yaw rate (and
/// vy) channels are low-pass prefiltered before the centered finite
/// differences unless the cutoff is 0. Throws if fewer than
/// opts.min_samples rows survive per axle.
AxleForceSamples extract_force_samples(const std::vector<TruthSample>& rows,
                                       const VehicleParams& vp,
                                       const ExtractOptions& opts = {});

/// Splits samples by turn direction: alpha >= 0 goes to the left-turn set.
std::pair<std::vector<ForceSample>, std::vector<ForceSample>> split_by_direction(
    const std::vector<ForceSample>& samples);

/// Box bounds for the five macro-parameters.
struct PacejkaBounds {
  PacejkaAxleParams lo{0.3, 1.0, 0.8, -2.0, -0.2};
  PacejkaAxleParams hi{2.5, 30.0, 2.5, 0.999999, 0.2};
};

enum class FitStatus {
  Converged,
  IterationCap,  // still improving more than 1e-6 per step when the cap hit
  BoundStuck,    // converged with at least one parameter pinned at a bound
  Degenerate,    // data cannot identify the parameters
};

struct FitResult {
  PacejkaAxleParams params;
  double rms_residual = 0.0;
  int iterations = 0;
  FitStatus status = FitStatus::Converged;
  std::array<bool, 5> bound_active{};  // mu, B, C, E, Sv
  std::vector<double> cost_history;    // accepted costs, strictly decreasing
};

/// Weighted least-squares fit of the magic-formula macro-parameters via
/// Levenberg-Marquardt with a numerically differenced Jacobian. Stops when
/// the relative cost change drops below 1e-8 or after 200 iterations.
FitResult fit_pacejka(const std::vector<ForceSample>& samples, const PacejkaAxleParams& init,
                      const PacejkaBounds& bounds = {});

const char* to_string(FitStatus status);

}  // namespace latdyn
