#pragma once

#include <string>
#include <vector>

#include "latdyn/banking.hpp"
#include "latdyn/estimator.hpp"
#include "latdyn/sim.hpp"

// CSV schemas. All files are UTF-8 with LF line endings, '.' decimal
// separator and exactly one header row.
//
//   truth:    t_s,vy_mps,r_radps,ay_mps2,delta_rad,vx_mps,ax_mps2,theta_rad,s_m
//   sensors:  t_s,delta_rad,vx_mps,ax_mps2,s_m,src,m1,m2      src in {-, lidar, imu}
//   banking:  s_m,theta_rad
//   estimate: t_s,vy_est,r_est,ay_est,var_vy,var_r,var_ay,beta_rad,understeer_rad

namespace latdyn {

/// Shortest representation that reads back to the same double ("%.12g" is
/// used everywhere so identical runs produce identical bytes).
std::string format_double(double v);

void write_truth_csv(const std::string& path, const TruthTrajectory& traj);
TruthTrajectory read_truth_csv(const std::string& path);

void write_sensor_csv(const std::string& path, const std::vector<SensorRecord>& records);
/// Rejects files with more than `max_bad_rows` malformed rows.
std::vector<SensorRecord> read_sensor_csv(const std::string& path, int max_bad_rows = 0);

void write_banking_csv(const std::string& path, const BankingMap& map);
BankingMap read_banking_csv(const std::string& path);

struct EstimateRow {
  double t = 0.0;
  double vy = 0.0, r = 0.0, ay = 0.0;
  double var_vy = 0.0, var_r = 0.0, var_ay = 0.0;
  double beta = 0.0, understeer = 0.0;
};

void write_estimate_csv(const std::string& path, const std::vector<EstimatorOutput>& outputs);
std::vector<EstimateRow> read_estimate_csv(const std::string& path);

}  // namespace latdyn
