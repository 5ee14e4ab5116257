#pragma once

#include <map>
#include <optional>
#include <string>

#include "latdyn/estimator.hpp"
#include "latdyn/fitting.hpp"
#include "latdyn/sim.hpp"
#include "latdyn/vehicle_model.hpp"

namespace latdyn {

/// Flat key-value configuration with `[section]` headers. Keys are addressed
/// as "section.key". Angle-valued keys accept either a `_rad` or a `_deg`
/// suffix; `_deg` values are converted at ingestion.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Looks up `base_rad` / `base_deg` (exactly one may be present).
  double get_angle(const std::string& base, double fallback_rad) const;

  /// Parses "x1:y1, x2:y2, ..." into a profile.
  Profile get_profile(const std::string& key) const;
  /// Same, with angle-suffix handling applied to the y values.
  Profile get_angle_profile(const std::string& base) const;

  void set(const std::string& key, const std::string& value);

  /// Sorted `key = value` serialization; input to the config digest.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

// Ingestion of the domain structures. Missing keys fall back to the built-in
// defaults, so an empty config is a valid (dry, matched) setup.
VehicleParams load_vehicle_params(const Config& cfg);
TireParamSet load_tire_set(const Config& cfg);
PacejkaAxleParams load_axle_params(const Config& cfg, const std::string& section,
                                   const PacejkaAxleParams& fallback);
EstimatorConfig load_estimator_config(const Config& cfg);
NoiseModel load_noise_model(const Config& cfg);
Scenario load_scenario(const Config& cfg);

}  // namespace latdyn
