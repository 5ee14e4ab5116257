#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "latdyn/config.hpp"
#include "latdyn/estimator.hpp"
#include "latdyn/metrics.hpp"
#include "latdyn/sim.hpp"

// File-level command implementations shared by the CLI front end and the
// test suites. Each returns a process exit code.

namespace latdyn {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,        // bad flags, unreadable or malformed inputs
  kExitNumerical = 3,    // covariance fault, singular innovation, non-finite
  kExitNoConvergence = 4,
  kExitBoundStuck = 5,
};

/// Drives an estimator over an in-memory sensor log. Records sharing a
/// timestamp form one step; measurements arriving with the very first
/// timestamp are applied without a prediction.
struct EstimateRun {
  std::vector<EstimatorOutput> outputs;
  std::uint64_t rejected_outliers = 0;
  std::uint64_t skipped_nonfinite = 0;
  double mean_step_latency_s = 0.0;
};

EstimateRun run_estimator(Estimator& estimator, const std::vector<SensorRecord>& records);

struct SimulateArgs {
  std::string scenario;  // preset name or scenario config path
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

/// Writes truth.csv, sensors.csv and banking.csv for the scenario.
int cmd_simulate(const SimulateArgs& args, std::ostream& log);

struct EstimateArgs {
  std::string sensor_csv;
  std::string config_file;   // optional; defaults match configs/default.ini
  std::string truth_csv;     // optional; enables the run report
  std::string banking_csv;   // optional; overrides the config key
  std::string out_dir = ".";
  bool disable_lidar = false;
  bool disable_imu = false;
  bool svg = false;
  int max_bad_rows = 10;
  std::string scenario_name = "estimate";
};

/// Streams the log through the estimator; writes estimate.csv and, when
/// truth is given, report.txt (also echoed to `log`).
int cmd_estimate(const EstimateArgs& args, std::ostream& log);

struct FitArgs {
  std::string log_csv;       // truth-schema log
  std::string init_config;   // optional; initial guesses from [tires.*]
  std::string out_file;
  double prefilter_cutoff_hz = 5.0;
};

/// Fits the four (axle x direction) parameter sets and writes the report.
int cmd_fit(const FitArgs& args, std::ostream& log);

struct MetricsArgs {
  std::string estimate_csv;
  std::string truth_csv;
  double cutoff_hz = 5.0;
  std::string scenario_name = "metrics";
  bool svg = false;
  std::string out_dir = ".";
};

int cmd_metrics(const MetricsArgs& args, std::ostream& log);

}  // namespace latdyn
