#include "latdyn/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace latdyn {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0' || !std::isfinite(v))
    throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + t + "'");
  return v;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(it->second, key);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = trim(it->second);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: key '" + key + "' is not a boolean");
}

double Config::get_angle(const std::string& base, double fallback_rad) const {
  const bool has_rad = has(base + "_rad");
  const bool has_deg = has(base + "_deg");
  if (has_rad && has_deg)
    throw std::invalid_argument("config: both '" + base + "_rad' and '" + base +
                                "_deg' are present");
  if (has_rad) return get_double(base + "_rad");
  if (has_deg) return get_double(base + "_deg") * std::numbers::pi / 180.0;
  return fallback_rad;
}

namespace {

Profile parse_profile(const std::string& text, const std::string& key, double value_scale) {
  Profile profile;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("config: profile '" + key + "' expects 'x:y' pairs");
    const double x = parse_double(item.substr(0, colon), key);
    const double y = parse_double(item.substr(colon + 1), key) * value_scale;
    profile.emplace_back(x, y);
  }
  if (profile.empty())
    throw std::invalid_argument("config: profile '" + key + "' is empty");
  return profile;
}

}  // namespace

Profile Config::get_profile(const std::string& key) const {
  return parse_profile(get_string(key), key, 1.0);
}

Profile Config::get_angle_profile(const std::string& base) const {
  const bool has_rad = has(base + "_rad");
  const bool has_deg = has(base + "_deg");
  if (has_rad == has_deg)
    throw std::invalid_argument("config: profile '" + base +
                                "' needs exactly one of _rad/_deg");
  if (has_rad) return parse_profile(get_string(base + "_rad"), base, 1.0);
  return parse_profile(get_string(base + "_deg"), base, std::numbers::pi / 180.0);
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string Config::canonical() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
  return out.str();
}

VehicleParams load_vehicle_params(const Config& cfg) {
  VehicleParams vp;
  vp.m = cfg.get_double("vehicle.m", vp.m);
  vp.Jz = cfg.get_double("vehicle.Jz", vp.Jz);
  vp.lf = cfg.get_double("vehicle.lf", vp.lf);
  vp.lr = cfg.get_double("vehicle.lr", vp.lr);
  vp.h_cg = cfg.get_double("vehicle.h_cg", vp.h_cg);
  vp.aero_cl_f = cfg.get_double("vehicle.aero_cl_f", vp.aero_cl_f);
  vp.aero_cl_r = cfg.get_double("vehicle.aero_cl_r", vp.aero_cl_r);
  vp.static_front_ratio = cfg.get_double("vehicle.static_front_ratio", vp.static_front_ratio);
  vp.vx_min = cfg.get_double("vehicle.vx_min", vp.vx_min);
  vp.tau_ay = cfg.get_double("vehicle.tau_ay", vp.tau_ay);
  vp.validate();
  return vp;
}

PacejkaAxleParams load_axle_params(const Config& cfg, const std::string& section,
                                   const PacejkaAxleParams& fallback) {
  PacejkaAxleParams p;
  p.mu = cfg.get_double(section + ".mu", fallback.mu);
  p.B = cfg.get_double(section + ".B", fallback.B);
  p.C = cfg.get_double(section + ".C", fallback.C);
  p.E = cfg.get_double(section + ".E", fallback.E);
  p.Sv = cfg.get_double(section + ".Sv", fallback.Sv);
  p.validate();
  return p;
}

TireParamSet load_tire_set(const Config& cfg) {
  const TireParamSet dry = dry_tire_table();
  TireParamSet t;
  t.front_left_turn = load_axle_params(cfg, "tires.front_left_turn", dry.front_left_turn);
  t.front_right_turn = load_axle_params(cfg, "tires.front_right_turn", dry.front_right_turn);
  t.rear_left_turn = load_axle_params(cfg, "tires.rear_left_turn", dry.rear_left_turn);
  t.rear_right_turn = load_axle_params(cfg, "tires.rear_right_turn", dry.rear_right_turn);
  return t;
}

EstimatorConfig load_estimator_config(const Config& cfg) {
  EstimatorConfig ec;
  ec.sigma.alpha = cfg.get_double("ukf.alpha", ec.sigma.alpha);
  ec.sigma.beta = cfg.get_double("ukf.beta", ec.sigma.beta);
  ec.sigma.kappa = cfg.get_double("ukf.kappa", ec.sigma.kappa);
  ec.q_diag(0) = cfg.get_double("noise.q_vy", ec.q_diag(0));
  ec.q_diag(1) = cfg.get_double("noise.q_r", ec.q_diag(1));
  ec.q_diag(2) = cfg.get_double("noise.q_ay", ec.q_diag(2));
  ec.r_lidar(0) = cfg.get_double("noise.r_lidar_vy", ec.r_lidar(0));
  ec.r_lidar(1) = cfg.get_double("noise.r_lidar_r", ec.r_lidar(1));
  ec.r_imu(0) = cfg.get_double("noise.r_imu_ay", ec.r_imu(0));
  ec.r_imu(1) = cfg.get_double("noise.r_imu_r", ec.r_imu(1));
  ec.gate_sigma = cfg.get_double("estimator.gate_sigma", ec.gate_sigma);
  ec.gate_max_consecutive = static_cast<int>(
      cfg.get_double("estimator.gate_max_consecutive", ec.gate_max_consecutive));
  ec.init_state(0) = cfg.get_double("estimator.init_vy", ec.init_state(0));
  ec.init_state(1) = cfg.get_double("estimator.init_r", ec.init_state(1));
  ec.init_state(2) = cfg.get_double("estimator.init_ay", ec.init_state(2));
  ec.init_var(0) = cfg.get_double("estimator.init_var_vy", ec.init_var(0));
  ec.init_var(1) = cfg.get_double("estimator.init_var_r", ec.init_var(1));
  ec.init_var(2) = cfg.get_double("estimator.init_var_ay", ec.init_var(2));
  ec.process_dt_max = cfg.get_double("estimator.process_dt_max", ec.process_dt_max);
  ec.use_lidar = cfg.get_bool("estimator.use_lidar", ec.use_lidar);
  ec.use_imu = cfg.get_bool("estimator.use_imu", ec.use_imu);
  ec.validate();
  return ec;
}

NoiseModel load_noise_model(const Config& cfg) {
  NoiseModel nm;
  nm.lidar.rate_hz = cfg.get_double("sensors.lidar_rate_hz", nm.lidar.rate_hz);
  nm.lidar.sigma_m1 = cfg.get_double("sensors.lidar_sigma_vy", nm.lidar.sigma_m1);
  nm.lidar.sigma_m2 = cfg.get_double("sensors.lidar_sigma_r", nm.lidar.sigma_m2);
  nm.lidar.bias_m1 = cfg.get_double("sensors.lidar_bias_vy", nm.lidar.bias_m1);
  nm.lidar.bias_m2 = cfg.get_double("sensors.lidar_bias_r", nm.lidar.bias_m2);
  nm.imu.rate_hz = cfg.get_double("sensors.imu_rate_hz", nm.imu.rate_hz);
  nm.imu.sigma_m1 = cfg.get_double("sensors.imu_sigma_ay", nm.imu.sigma_m1);
  nm.imu.sigma_m2 = cfg.get_double("sensors.imu_sigma_r", nm.imu.sigma_m2);
  nm.imu.bias_m1 = cfg.get_double("sensors.imu_bias_ay", nm.imu.bias_m1);
  nm.imu.bias_m2 = cfg.get_double("sensors.imu_bias_r", nm.imu.bias_m2);
  nm.input_rate_hz = cfg.get_double("sensors.input_rate_hz", nm.input_rate_hz);
  nm.spike_probability = cfg.get_double("sensors.lidar_spike_probability", nm.spike_probability);
  nm.spike_magnitude = cfg.get_double("sensors.lidar_spike_magnitude", nm.spike_magnitude);
  nm.validate();
  return nm;
}

Scenario load_scenario(const Config& cfg) {
  Scenario sc;
  sc.truth_tires = dry_tire_table();  // same fallback as the estimator side
  if (cfg.has("scenario.preset")) sc = preset_scenario(cfg.get_string("scenario.preset"));
  sc.name = cfg.get_string("scenario.name", sc.name);
  sc.duration = cfg.get_double("scenario.duration_s", sc.duration);
  sc.dt_truth = cfg.get_double("scenario.dt_truth_s", sc.dt_truth);
  sc.grip_scale = cfg.get_double("scenario.grip_scale", sc.grip_scale);

  if (cfg.has("track.banking_profile_rad") || cfg.has("track.banking_profile_deg")) {
    const double length = cfg.get_double("track.length_m");
    sc.track = BankingMap(cfg.get_angle_profile("track.banking_profile"), length);
  }
  if (cfg.has("scenario.speed_profile_mps"))
    sc.speed_profile = cfg.get_profile("scenario.speed_profile_mps");
  if (cfg.has("scenario.steering_profile_rad") || cfg.has("scenario.steering_profile_deg"))
    sc.steering_profile = cfg.get_angle_profile("scenario.steering_profile");

  sc.truth_vehicle = load_vehicle_params(cfg);
  const TireParamSet fallback = sc.truth_tires;
  TireParamSet t;
  t.front_left_turn = load_axle_params(cfg, "tires.front_left_turn", fallback.front_left_turn);
  t.front_right_turn =
      load_axle_params(cfg, "tires.front_right_turn", fallback.front_right_turn);
  t.rear_left_turn = load_axle_params(cfg, "tires.rear_left_turn", fallback.rear_left_turn);
  t.rear_right_turn = load_axle_params(cfg, "tires.rear_right_turn", fallback.rear_right_turn);
  sc.truth_tires = t;
  sc.validate();
  return sc;
}

}  // namespace latdyn
