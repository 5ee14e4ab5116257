#include "latdyn/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "latdyn/random.hpp"

namespace latdyn {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::size_t segment_index(const Profile& profile, double t) {
  // Index of the segment [t_i, t_{i+1}) containing t, clamped to the ends.
  std::size_t i = 0;
  while (i + 2 < profile.size() && t >= profile[i + 1].first) ++i;
  return i;
}

}  // namespace

double profile_value(const Profile& profile, double t) {
  if (profile.empty()) throw std::invalid_argument("profile is empty");
  if (profile.size() == 1) return profile.front().second;
  if (t <= profile.front().first) return profile.front().second;
  if (t >= profile.back().first) return profile.back().second;
  const std::size_t i = segment_index(profile, t);
  const auto [t0, v0] = profile[i];
  const auto [t1, v1] = profile[i + 1];
  return v0 + (t - t0) / (t1 - t0) * (v1 - v0);
}

double profile_slope(const Profile& profile, double t) {
  if (profile.size() < 2) return 0.0;
  if (t < profile.front().first || t >= profile.back().first) return 0.0;
  const std::size_t i = segment_index(profile, t);
  const auto [t0, v0] = profile[i];
  const auto [t1, v1] = profile[i + 1];
  return (v1 - v0) / (t1 - t0);
}

void Scenario::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("Scenario: duration must be > 0");
  if (!(dt_truth > 0.0 && dt_truth <= 0.1))
    throw std::invalid_argument("Scenario: dt_truth must be in (0, 0.1]");
  if (!(grip_scale > 0.0)) throw std::invalid_argument("Scenario: grip_scale must be > 0");
  if (speed_profile.empty() || steering_profile.empty())
    throw std::invalid_argument("Scenario: profiles must be non-empty");
  for (const Profile* p : {&speed_profile, &steering_profile}) {
    for (std::size_t i = 1; i < p->size(); ++i)
      if ((*p)[i].first <= (*p)[i - 1].first)
        throw std::invalid_argument("Scenario: profile times must be strictly increasing");
  }
  truth_vehicle.validate();
  truth_tires.validate();
}

TruthTrajectory simulate_truth(const Scenario& sc) {
  sc.validate();
  const TireParamSet tires = sc.truth_tires.scaled_grip(sc.grip_scale);
  const double length = sc.track.track_length();

  TruthTrajectory traj;
  traj.track_length = length;
  const auto steps = static_cast<std::size_t>(std::llround(sc.duration / sc.dt_truth));
  traj.samples.reserve(steps + 1);

  StateVec state;
  double s_unwrapped = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * sc.dt_truth;

    InputVec input;
    input.delta = profile_value(sc.steering_profile, t);
    input.vx = profile_value(sc.speed_profile, t);
    input.ax = profile_slope(sc.speed_profile, t);
    input.theta = sc.track.lookup(s_unwrapped);

    double s = std::fmod(s_unwrapped, length);
    if (s < 0.0) s += length;
    traj.samples.push_back({t, state, input, s, s_unwrapped});

    if (!traj.spin && std::abs(state.vy) > input.vx) {
      traj.spin = true;
      traj.spin_time = t;
    }

    if (k < steps) {
      state = step_euler(state, input, sc.dt_truth, sc.truth_vehicle, tires);
      s_unwrapped += input.vx * sc.dt_truth;
    }
  }
  return traj;
}

void NoiseModel::validate() const {
  for (const SourceNoise* sn : {&lidar, &imu}) {
    if (!(sn->rate_hz > 0.0)) throw std::invalid_argument("NoiseModel: rates must be > 0");
    if (sn->sigma_m1 < 0.0 || sn->sigma_m2 < 0.0)
      throw std::invalid_argument("NoiseModel: sigmas must be >= 0");
  }
  if (!(input_rate_hz > 0.0)) throw std::invalid_argument("NoiseModel: input rate must be > 0");
  if (!(spike_probability >= 0.0 && spike_probability < 1.0))
    throw std::invalid_argument("NoiseModel: spike probability must be in [0, 1)");
}

namespace {

struct TruthAt {
  StateVec state;
  double delta, vx, ax, s;
};

TruthAt interpolate_truth(const TruthTrajectory& traj, double t) {
  const auto& samples = traj.samples;
  const double t0 = samples.front().t;
  const double dt = samples.size() > 1 ? samples[1].t - t0 : 1.0;
  double pos = (t - t0) / dt;
  // Sensor clocks that divide the truth rate land on grid samples exactly;
  // snap away the last-ulp wobble of the index arithmetic.
  const double snapped = std::round(pos);
  if (std::abs(pos - snapped) < 1e-6) pos = snapped;
  const auto lo = static_cast<std::size_t>(
      std::clamp(std::floor(pos), 0.0, static_cast<double>(samples.size() - 1)));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double u = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);

  const TruthSample& a = samples[lo];
  const TruthSample& b = samples[hi];
  auto lerp = [u](double x, double y) { return x + u * (y - x); };

  TruthAt out;
  out.state.vy = lerp(a.state.vy, b.state.vy);
  out.state.r = lerp(a.state.r, b.state.r);
  out.state.ay = lerp(a.state.ay, b.state.ay);
  out.delta = lerp(a.input.delta, b.input.delta);
  out.vx = lerp(a.input.vx, b.input.vx);
  out.ax = lerp(a.input.ax, b.input.ax);
  double s = std::fmod(lerp(a.s_unwrapped, b.s_unwrapped), traj.track_length);
  if (s < 0.0) s += traj.track_length;
  out.s = s;
  return out;
}

}  // namespace

std::vector<SensorRecord> synthesize_sensors(const TruthTrajectory& truth,
                                             const NoiseModel& nm, std::uint64_t seed) {
  nm.validate();
  if (truth.samples.empty())
    throw std::invalid_argument("synthesize_sensors: empty trajectory");
  const double t_end = truth.samples.back().t;

  std::vector<SensorRecord> records;
  Rng rng(seed);

  auto base_record = [&](double t) {
    const TruthAt at = interpolate_truth(truth, t);
    SensorRecord rec;
    rec.t = t;
    rec.delta = at.delta;
    rec.vx = at.vx;
    rec.ax = at.ax;
    rec.s = at.s;
    return rec;
  };

  // Input-only rows drive prediction between measurements.
  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / nm.input_rate_hz;
    if (t > t_end) break;
    records.push_back(base_record(t));
  }

  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / nm.lidar.rate_hz;
    if (t > t_end) break;
    const TruthAt at = interpolate_truth(truth, t);
    SensorRecord rec = base_record(t);
    Measurement m;
    m.timestamp = t;
    m.source = MeasurementSource::LidarOdom;
    m.m1 = at.state.vy + nm.lidar.bias_m1 + rng.gaussian(0.0, nm.lidar.sigma_m1);
    m.m2 = at.state.r + nm.lidar.bias_m2 + rng.gaussian(0.0, nm.lidar.sigma_m2);
    if (nm.spike_probability > 0.0 && rng.chance(nm.spike_probability))
      m.m1 += rng.chance(0.5) ? nm.spike_magnitude : -nm.spike_magnitude;
    rec.meas = m;
    records.push_back(rec);
  }

  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / nm.imu.rate_hz;
    if (t > t_end) break;
    const TruthAt at = interpolate_truth(truth, t);
    SensorRecord rec = base_record(t);
    Measurement m;
    m.timestamp = t;
    m.source = MeasurementSource::Imu;
    m.m1 = at.state.ay + nm.imu.bias_m1 + rng.gaussian(0.0, nm.imu.sigma_m1);
    m.m2 = at.state.r + nm.imu.bias_m2 + rng.gaussian(0.0, nm.imu.sigma_m2);
    rec.meas = m;
    records.push_back(rec);
  }

  // Interleave by time; ties ordered input, lidar, imu.
  auto rank = [](const SensorRecord& r) {
    if (!r.meas) return 0;
    return r.meas->source == MeasurementSource::LidarOdom ? 1 : 2;
  };
  std::stable_sort(records.begin(), records.end(),
                   [&](const SensorRecord& a, const SensorRecord& b) {
                     if (a.t != b.t) return a.t < b.t;
                     return rank(a) < rank(b);
                   });
  return records;
}

TireParamSet dry_tire_table() {
  TireParamSet t;
  t.front_left_turn = {1.68, 9.8, 1.42, 0.62, 0.012};
  t.front_right_turn = {1.64, 9.4, 1.40, 0.58, -0.010};
  t.rear_left_turn = {1.72, 11.5, 1.38, 0.55, 0.010};
  t.rear_right_turn = {1.70, 11.0, 1.36, 0.52, -0.008};
  return t;
}

namespace {

Scenario preset_oval() {
  Scenario sc;
  sc.name = "oval";
  sc.duration = 60.0;
  sc.grip_scale = 1.0;
  sc.truth_tires = dry_tire_table();

  // 2.4 km oval, two corner pairs with different banking plateaus.
  sc.track = BankingMap(
      {{0.0, 0.0},
       {400.0, 0.0},
       {500.0, 15.0 * kDegToRad},
       {900.0, 15.0 * kDegToRad},
       {1000.0, 0.0},
       {1600.0, 0.0},
       {1700.0, 22.0 * kDegToRad},
       {2100.0, 22.0 * kDegToRad},
       {2200.0, 0.0}},
      2400.0);

  const double vx = 55.0;
  sc.speed_profile = {{0.0, vx}, {sc.duration, vx}};

  // Steering plateaus aligned with the banked corners (s = vx * t).
  const double d1 = 0.020;  // ~200 m radius corners
  const double d2 = 0.020;
  auto t_at = [vx](double s) { return s / vx; };
  sc.steering_profile = {
      {0.0, 0.0},
      {t_at(450.0), 0.0},   {t_at(550.0), d1},   {t_at(850.0), d1},   {t_at(950.0), 0.0},
      {t_at(1650.0), 0.0},  {t_at(1750.0), d2},  {t_at(2050.0), d2},  {t_at(2150.0), 0.0},
      {t_at(2850.0), 0.0},  {t_at(2950.0), d1},  {t_at(3250.0), d1},  {t_at(3300.0), 0.0}};
  return sc;
}

Scenario preset_chicane() {
  Scenario sc;
  sc.name = "chicane";
  sc.duration = 30.0;
  sc.track = BankingMap::flat(0.0);
  sc.truth_tires = dry_tire_table();
  sc.speed_profile = {{0.0, 45.0}, {8.0, 45.0}, {10.0, 34.0}, {20.0, 34.0}, {24.0, 45.0},
                      {30.0, 45.0}};
  sc.steering_profile = {{0.0, 0.0},   {10.0, 0.0},  {11.0, 0.035},  {13.0, 0.035},
                         {14.0, -0.035}, {16.0, -0.035}, {17.0, 0.025}, {18.5, 0.025},
                         {19.5, 0.0},  {30.0, 0.0}};
  return sc;
}

Scenario preset_wet() {
  Scenario sc;
  sc.name = "wet";
  sc.duration = 9.5;  // the log ends just past spin onset (~9.24 s)
  sc.grip_scale = 0.6;
  sc.track = BankingMap::flat(0.0);

  // Wet balance: the rear gives up more grip than the front, so pushing
  // past the limit ends in a spin rather than a stable understeer plateau.
  sc.truth_tires = dry_tire_table();
  sc.truth_tires.rear_left_turn.mu *= 0.88;
  sc.truth_tires.rear_right_turn.mu *= 0.88;

  sc.speed_profile = {{0.0, 38.0}, {sc.duration, 38.0}};
  // Long right-hander, tightened until the rear lets go.
  sc.steering_profile = {{0.0, 0.0}, {4.0, 0.0}, {8.0, -0.025}, {12.0, -0.034}};
  return sc;
}

}  // namespace

Scenario preset_scenario(const std::string& name) {
  if (name == "oval") return preset_oval();
  if (name == "chicane") return preset_chicane();
  if (name == "wet") return preset_wet();
  throw std::invalid_argument("unknown scenario preset: " + name);
}

std::vector<std::string> preset_names() { return {"oval", "chicane", "wet"}; }

}  // namespace latdyn
