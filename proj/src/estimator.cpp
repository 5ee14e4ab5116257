#include "latdyn/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latdyn {

Eigen::Vector2d h_lidar(const Eigen::Vector3d& state) {
  return {state(0), state(1)};
}

Eigen::Vector2d h_imu(const Eigen::Vector3d& state) {
  return {state(2), state(1)};
}

double sideslip(double vy, double vx, double vx_min) {
  return std::atan(vy / std::max(vx, vx_min));
}

double understeer_degree(double delta, double r, double vx, const VehicleParams& vp) {
  return delta - vp.wheelbase() * r / std::max(vx, vp.vx_min);
}

void EstimatorConfig::validate() const {
  sigma.validate(3);
  if (!(q_diag.array() > 0.0).all())
    throw std::invalid_argument("EstimatorConfig: q_diag entries must be > 0");
  if (!(r_lidar.array() > 0.0).all() || !(r_imu.array() > 0.0).all())
    throw std::invalid_argument("EstimatorConfig: r_diag entries must be > 0");
  if (!(init_var.array() >= 0.0).all())
    throw std::invalid_argument("EstimatorConfig: init_var entries must be >= 0");
  if (!(gate_sigma > 0.0)) throw std::invalid_argument("EstimatorConfig: gate_sigma must be > 0");
  if (!(process_dt_max > 0.0 && process_dt_max <= 0.1))
    throw std::invalid_argument("EstimatorConfig: process_dt_max must be in (0, 0.1]");
}

Estimator::Estimator(VehicleParams vp, TireParamSet tires, BankingMap banking,
                     EstimatorConfig cfg)
    : vp_(std::move(vp)), tires_(std::move(tires)), banking_(std::move(banking)),
      cfg_(std::move(cfg)) {
  vp_.validate();
  tires_.validate();
  cfg_.validate();
  reset();
}

void Estimator::reset() {
  est_.mean = cfg_.init_state;
  est_.cov = cfg_.init_var.asDiagonal();
  rejected_outliers_ = 0;
  skipped_nonfinite_ = 0;
  reject_streak_lidar_ = 0;
  reject_streak_imu_ = 0;
}

EstimatorOutput Estimator::step(const StepInput& input,
                                std::span<const Measurement> measurements, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("Estimator::step: dt must be > 0");

  InputVec u;
  u.delta = input.delta;
  u.vx = input.vx;
  u.ax = input.ax;
  u.theta = banking_.lookup(input.s);

  // Integrate over dt in Euler substeps no longer than process_dt_max, so
  // the transition stays a pure map of (state, input) for the sigma points.
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / cfg_.process_dt_max)));
  const double h = dt / substeps;
  auto process = [&](const Eigen::Vector3d& x) -> Eigen::Vector3d {
    StateVec s{x(0), x(1), x(2)};
    for (int i = 0; i < substeps; ++i) s = step_euler(s, u, h, vp_, tires_);
    return {s.vy, s.r, s.ay};
  };

  est_ = ukf::predict<3>(est_, process, cfg_.q_diag, cfg_.sigma);
  apply_measurements(measurements);
  return make_output(input);
}

EstimatorOutput Estimator::update_only(const StepInput& input,
                                       std::span<const Measurement> measurements) {
  apply_measurements(measurements);
  return make_output(input);
}

void Estimator::apply_measurements(std::span<const Measurement> measurements) {
  for (const Measurement& meas : measurements) {
    if (!std::isfinite(meas.m1) || !std::isfinite(meas.m2)) {
      ++skipped_nonfinite_;
      continue;
    }
    const bool is_lidar = meas.source == MeasurementSource::LidarOdom;
    if (is_lidar && !cfg_.use_lidar) continue;
    if (!is_lidar && !cfg_.use_imu) continue;

    const Eigen::Vector2d z{meas.m1, meas.m2};
    const Eigen::Vector2d r_diag = is_lidar ? cfg_.r_lidar : cfg_.r_imu;
    const auto h = is_lidar ? h_lidar : h_imu;
    int& streak = is_lidar ? reject_streak_lidar_ : reject_streak_imu_;

    const auto moments = ukf::measurement_moments<2>(est_, h, r_diag, cfg_.sigma);
    const bool outlier = ukf::innovation_distance(moments, z) > cfg_.gate_sigma;
    const bool force = cfg_.gate_max_consecutive > 0 && streak >= cfg_.gate_max_consecutive;
    if (outlier && !force) {
      ++rejected_outliers_;
      ++streak;
      continue;
    }
    streak = 0;
    est_ = ukf::apply_update(est_, moments, z);
  }
}

EstimatorOutput Estimator::make_output(const StepInput& input) const {
  EstimatorOutput out;
  out.timestamp = input.t;
  out.state = {est_.mean(0), est_.mean(1), est_.mean(2)};
  out.cov_diag = est_.cov.diagonal().cwiseMax(0.0);
  out.beta = sideslip(out.state.vy, input.vx, vp_.vx_min);
  out.understeer = understeer_degree(input.delta, out.state.r, input.vx, vp_);
  return out;
}

}  // namespace latdyn
