#pragma once

#include <utility>

namespace latdyn {

inline constexpr double kGravity = 9.80665;  // m/s^2

/// Lateral-dynamics state: lateral velocity, yaw rate (positive
/// counterclockwise), lateral acceleration.
struct StateVec {
  double vy = 0.0;  // m/s
  double r = 0.0;   // rad/s
  double ay = 0.0;  // m/s^2
};

/// Exogenous inputs to the single-track model.
struct InputVec {
  double delta = 0.0;  // steering angle at the front axle, rad
  double vx = 0.0;     // longitudinal velocity, m/s (>= 0)
  double ax = 0.0;     // longitudinal acceleration, m/s^2
  double theta = 0.0;  // track banking angle, rad
};

struct VehicleParams {
  double m = 750.0;      // mass, kg
  double Jz = 1000.0;    // yaw inertia, kg m^2
  double lf = 1.7;       // CoG to front axle, m
  double lr = 1.3;       // CoG to rear axle, m
  double h_cg = 0.30;    // CoG height, m
  double aero_cl_f = 0.40;  // front downforce coefficient, N s^2/m^2
  double aero_cl_r = 0.65;  // rear downforce coefficient, N s^2/m^2
  double static_front_ratio = 0.45;  // fraction of gravitational load on front
  double vx_min = 1.0;   // low-speed clamp, m/s
  double tau_ay = 0.05;  // lateral-acceleration relaxation time constant, s

  double wheelbase() const { return lf + lr; }
  void validate() const;  // throws std::invalid_argument on bad values
};

/// Magic-formula macro-parameters for one axle and one turn direction.
struct PacejkaAxleParams {
  double mu = 1.0;  // peak friction coefficient
  double B = 10.0;  // stiffness factor, 1/rad
  double C = 1.5;   // shape factor
  double E = 0.9;   // curvature factor (< 1)
  double Sv = 0.0;  // vertical shift of the normalized force

  void validate() const;
};

/// Per-axle, per-turn-direction parameter sets. Left/right asymmetry models
/// camber, toe and pressure differences of an oval setup.
struct TireParamSet {
  PacejkaAxleParams front_left_turn;
  PacejkaAxleParams front_right_turn;
  PacejkaAxleParams rear_left_turn;
  PacejkaAxleParams rear_right_turn;

  void validate() const;
  /// Returns a copy with every mu multiplied by `scale`.
  TireParamSet scaled_grip(double scale) const;
};

/// Front and rear slip angles from the congruence equations. vx is clamped
/// at vp.vx_min internally, so no singularity at standstill.
std::pair<double, double> slip_angles(const StateVec& state, const InputVec& input,
                                      const VehicleParams& vp);

/// Normalized lateral force Dy for one axle. The left-turn set is used for
/// alpha >= 0, the right-turn set otherwise.
double normalized_lateral_force(double alpha, const PacejkaAxleParams& left,
                                const PacejkaAxleParams& right);

/// Banking contribution to the total vertical load, m * ay * tan(theta).
double banking_force(double m, double ay, double theta);

/// Front and rear axle vertical loads: static split, aero downforce, banking
/// (split by the static ratio) and longitudinal load transfer. Each load is
/// clamped at zero.
std::pair<double, double> normal_loads(const InputVec& input, double ay,
                                       const VehicleParams& vp);

/// Axle lateral forces, the normalized forces scaled by the vertical loads.
std::pair<double, double> lateral_forces(double Dyf, double Dyr, double Fzf, double Fzr);

/// Time derivative of the state under the single-track model. The ay
/// component relaxes toward the algebraic force/mass value with time
/// constant vp.tau_ay.
StateVec state_derivative(const StateVec& state, const InputVec& input,
                          const VehicleParams& vp, const TireParamSet& tires);

/// One explicit-Euler step. Requires 0 < dt <= 0.1 s.
StateVec step_euler(const StateVec& state, const InputVec& input, double dt,
                    const VehicleParams& vp, const TireParamSet& tires);

}  // namespace latdyn
