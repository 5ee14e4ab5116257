#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "latdyn/banking.hpp"
#include "latdyn/ukf.hpp"
#include "latdyn/vehicle_model.hpp"

namespace latdyn {

enum class MeasurementSource { LidarOdom, Imu };

/// One timestamped measurement. For LidarOdom the payload is (vy, r); for
/// Imu it is (ay, r).
struct Measurement {
  double timestamp = 0.0;
  MeasurementSource source = MeasurementSource::LidarOdom;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// Measurement model for the lidar-odometry source: picks (vy, r).
Eigen::Vector2d h_lidar(const Eigen::Vector3d& state);

/// Measurement model for the (fused) IMU source: picks (ay, r).
Eigen::Vector2d h_imu(const Eigen::Vector3d& state);

/// Sideslip angle beta = atan(vy / vx), with vx clamped at vx_min.
double sideslip(double vy, double vx, double vx_min);

/// Steering angle minus the kinematic (Ackermann) steering L*r/vx.
/// Positive means nose-out.
double understeer_degree(double delta, double r, double vx, const VehicleParams& vp);

struct EstimatorConfig {
  ukf::SigmaConfig sigma;
  Eigen::Vector3d q_diag{1e-4, 1e-5, 1e-3};           // process noise per predict
  Eigen::Vector2d r_lidar{2.5e-3, 1e-4};              // (vy, r) variances
  Eigen::Vector2d r_imu{4e-2, 2.5e-5};                // (ay, r) variances
  double gate_sigma = 5.0;                            // innovation gate, Mahalanobis
  // A gated source is force-accepted after this many consecutive rejections,
  // so a diverged model cannot lock the sensors out for good (0 disables).
  int gate_max_consecutive = 3;
  Eigen::Vector3d init_state{0.0, 0.0, 0.0};
  Eigen::Vector3d init_var{0.25, 0.01, 1.0};
  double process_dt_max = 0.008;                      // Euler substep ceiling, s
  bool use_lidar = true;
  bool use_imu = true;

  void validate() const;
};

/// Per-step inputs: everything the process model needs except the banking
/// angle, which is looked up from the map at the track position.
struct StepInput {
  double t = 0.0;      // s
  double delta = 0.0;  // rad
  double vx = 0.0;     // m/s
  double ax = 0.0;     // m/s^2
  double s = 0.0;      // track position, m
};

struct EstimatorOutput {
  double timestamp = 0.0;
  StateVec state;
  Eigen::Vector3d cov_diag = Eigen::Vector3d::Zero();
  double beta = 0.0;        // sideslip, rad
  double understeer = 0.0;  // rad
};

/// The lateral-dynamics filter: unscented prediction through the single-track
/// tire model, sequential corrections from lidar odometry and the IMU.
/// An instance owns its estimate; steps must be applied in time order.
class Estimator {
 public:
  Estimator(VehicleParams vp, TireParamSet tires, BankingMap banking, EstimatorConfig cfg);

  /// One predict over dt followed by one update per measurement, applied in
  /// the given order. Measurements must already be sorted by timestamp.
  EstimatorOutput step(const StepInput& input, std::span<const Measurement> measurements,
                       double dt);

  /// Corrections only, no prediction. Used to fold in measurements that
  /// arrive with the very first record, before any time has elapsed.
  EstimatorOutput update_only(const StepInput& input,
                              std::span<const Measurement> measurements);

  const ukf::GaussianEstimate<3>& estimate() const { return est_; }
  void reset();

  std::uint64_t rejected_outliers() const { return rejected_outliers_; }
  std::uint64_t skipped_nonfinite() const { return skipped_nonfinite_; }

 private:
  void apply_measurements(std::span<const Measurement> measurements);
  EstimatorOutput make_output(const StepInput& input) const;

  VehicleParams vp_;
  TireParamSet tires_;
  BankingMap banking_;
  EstimatorConfig cfg_;
  ukf::GaussianEstimate<3> est_;
  std::uint64_t rejected_outliers_ = 0;
  std::uint64_t skipped_nonfinite_ = 0;
  int reject_streak_lidar_ = 0;
  int reject_streak_imu_ = 0;
};

}  // namespace latdyn
