#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latdyn/csv.hpp"
#include "latdyn/sim.hpp"

namespace latdyn {

struct ChannelError {
  double rmse = 0.0;
  double max_abs = 0.0;
};

/// Summary of one estimation run, compared against the low-pass filtered
/// truth. mean_step_latency_s is present only when the run was actually
/// timed (recomputing a report from files stays deterministic).
struct RunReport {
  std::string scenario;
  ChannelError vy, r, ay;
  std::uint64_t spike_rejections = 0;
  std::uint64_t skipped_records = 0;
  std::optional<double> mean_step_latency_s;
  std::string config_digest;
};

/// FNV-1a 64-bit, hex-encoded. Used to fingerprint the effective config.
std::uint64_t fnv1a(std::string_view text);
std::string digest_hex(std::string_view text);

/// Errors of the estimate channels against the truth filtered at cutoff_hz
/// (first-order Butterworth, forward pass) and linearly interpolated at the
/// estimate timestamps.
RunReport compute_run_report(const std::vector<EstimateRow>& estimates,
                             const TruthTrajectory& truth, double cutoff_hz,
                             const std::string& scenario_name);

std::string format_run_report(const RunReport& report);

}  // namespace latdyn
