#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latdyn/banking.hpp"
#include "latdyn/estimator.hpp"
#include "latdyn/vehicle_model.hpp"

namespace latdyn {

/// Piecewise-linear profile over time, clamped outside the sampled range.
using Profile = std::vector<std::pair<double, double>>;

double profile_value(const Profile& profile, double t);
double profile_slope(const Profile& profile, double t);

/// A reproducible experiment: track, truth vehicle/tires and driver inputs.
struct Scenario {
  std::string name = "scenario";
  double duration = 60.0;   // s
  double dt_truth = 0.001;  // s
  BankingMap track = BankingMap::flat();
  TireParamSet truth_tires;
  VehicleParams truth_vehicle;
  Profile speed_profile{{0.0, 50.0}};     // (t, vx)
  Profile steering_profile{{0.0, 0.0}};   // (t, delta)
  double grip_scale = 1.0;                // multiplier on truth mu

  void validate() const;
};

/// Sampling rate, per-channel gaussian sigma and bias for one sensor source.
struct SourceNoise {
  double rate_hz = 100.0;
  double sigma_m1 = 0.0;
  double sigma_m2 = 0.0;
  double bias_m1 = 0.0;
  double bias_m2 = 0.0;
};

struct NoiseModel {
  SourceNoise lidar{20.0, 0.05, 0.01, 0.0, 0.0};   // (vy, r)
  SourceNoise imu{100.0, 0.20, 0.005, 0.0, 0.0};   // (ay, r)
  double input_rate_hz = 125.0;  // rate of measurement-free input records
  double spike_probability = 0.005;  // per lidar sample
  double spike_magnitude = 0.5;      // m/s, added to vy with random sign

  void validate() const;
};

struct TruthSample {
  double t = 0.0;
  StateVec state;
  InputVec input;
  double s = 0.0;           // track position wrapped to [0, track length)
  double s_unwrapped = 0.0; // monotone arc length, used for interpolation
};

struct TruthTrajectory {
  std::vector<TruthSample> samples;
  double track_length = 0.0;
  bool spin = false;        // |vy| exceeded vx at some point
  double spin_time = 0.0;   // first such time
};

/// Integrates the scenario's vehicle at dt_truth with the truth tires scaled
/// by grip_scale. Deterministic. A spin (|vy| > vx) is recorded, not fatal.
TruthTrajectory simulate_truth(const Scenario& sc);

/// One row of a sensor log: the exogenous inputs at this time plus at most
/// one measurement.
struct SensorRecord {
  double t = 0.0;
  double delta = 0.0;
  double vx = 0.0;
  double ax = 0.0;
  double s = 0.0;
  std::optional<Measurement> meas;
};

/// Samples each source at its own rate with additive gaussian noise, bias,
/// and Bernoulli spikes on the lidar vy channel. Deterministic given seed;
/// records come out interleaved in timestamp order.
std::vector<SensorRecord> synthesize_sensors(const TruthTrajectory& truth,
                                             const NoiseModel& nm, std::uint64_t seed);

/// Tire table of the default dry setup (asymmetric left/right, stiff rear).
TireParamSet dry_tire_table();

/// Built-in scenarios. Names: "oval", "chicane", "wet".
Scenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace latdyn
