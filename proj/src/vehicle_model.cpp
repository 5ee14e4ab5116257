#include "latdyn/vehicle_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latdyn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void VehicleParams::validate() const {
  require(std::isfinite(m) && m > 0.0, "VehicleParams: m must be > 0");
  require(std::isfinite(Jz) && Jz > 0.0, "VehicleParams: Jz must be > 0");
  require(std::isfinite(lf) && lf > 0.0, "VehicleParams: lf must be > 0");
  require(std::isfinite(lr) && lr > 0.0, "VehicleParams: lr must be > 0");
  require(std::isfinite(h_cg) && h_cg >= 0.0, "VehicleParams: h_cg must be >= 0");
  require(std::isfinite(aero_cl_f) && std::isfinite(aero_cl_r),
          "VehicleParams: aero coefficients must be finite");
  require(static_front_ratio > 0.0 && static_front_ratio < 1.0,
          "VehicleParams: static_front_ratio must be in (0,1)");
  require(std::isfinite(vx_min) && vx_min > 0.0, "VehicleParams: vx_min must be > 0");
  require(std::isfinite(tau_ay) && tau_ay > 0.0, "VehicleParams: tau_ay must be > 0");
}

void PacejkaAxleParams::validate() const {
  require(std::isfinite(mu) && mu > 0.0, "PacejkaAxleParams: mu must be > 0");
  require(std::isfinite(B) && B > 0.0, "PacejkaAxleParams: B must be > 0");
  require(std::isfinite(C) && C > 0.0, "PacejkaAxleParams: C must be > 0");
  require(std::isfinite(E) && E < 1.0, "PacejkaAxleParams: E must be < 1");
  require(std::isfinite(Sv), "PacejkaAxleParams: Sv must be finite");
}

void TireParamSet::validate() const {
  front_left_turn.validate();
  front_right_turn.validate();
  rear_left_turn.validate();
  rear_right_turn.validate();
}

TireParamSet TireParamSet::scaled_grip(double scale) const {
  TireParamSet out = *this;
  out.front_left_turn.mu *= scale;
  out.front_right_turn.mu *= scale;
  out.rear_left_turn.mu *= scale;
  out.rear_right_turn.mu *= scale;
  return out;
}

std::pair<double, double> slip_angles(const StateVec& state, const InputVec& input,
                                      const VehicleParams& vp) {
  const double vx = std::max(input.vx, vp.vx_min);
  const double alpha_f = -std::atan((state.vy + state.r * vp.lf) / vx) + input.delta;
  const double alpha_r = std::atan(-(state.vy - state.r * vp.lr) / vx);
  return {alpha_f, alpha_r};
}

double normalized_lateral_force(double alpha, const PacejkaAxleParams& left,
                                const PacejkaAxleParams& right) {
  const PacejkaAxleParams& p = (alpha >= 0.0) ? left : right;
  const double ba = p.B * alpha;
  return p.Sv + p.mu * std::sin(p.C * std::atan(ba - p.E * (ba - std::atan(ba))));
}

double banking_force(double m, double ay, double theta) {
  return m * ay * std::tan(theta);
}

std::pair<double, double> normal_loads(const InputVec& input, double ay,
                                       const VehicleParams& vp) {
  const double sfr = vp.static_front_ratio;
  const double fz_static = vp.m * kGravity;
  const double fz_bank = banking_force(vp.m, ay, input.theta);
  const double vx2 = input.vx * input.vx;
  const double dfz_long = vp.m * input.ax * vp.h_cg / vp.wheelbase();

  double fzf = fz_static * sfr + vp.aero_cl_f * vx2 + fz_bank * sfr - dfz_long;
  double fzr = fz_static * (1.0 - sfr) + vp.aero_cl_r * vx2 + fz_bank * (1.0 - sfr) + dfz_long;
  return {std::max(fzf, 0.0), std::max(fzr, 0.0)};
}

std::pair<double, double> lateral_forces(double Dyf, double Dyr, double Fzf, double Fzr) {
  return {Dyf * Fzf, Dyr * Fzr};
}

StateVec state_derivative(const StateVec& state, const InputVec& input,
                          const VehicleParams& vp, const TireParamSet& tires) {
  const auto [alpha_f, alpha_r] = slip_angles(state, input, vp);
  const double dyf =
      normalized_lateral_force(alpha_f, tires.front_left_turn, tires.front_right_turn);
  const double dyr =
      normalized_lateral_force(alpha_r, tires.rear_left_turn, tires.rear_right_turn);
  const auto [fzf, fzr] = normal_loads(input, state.ay, vp);
  const auto [fyf, fyr] = lateral_forces(dyf, dyr, fzf, fzr);

  const double cos_delta = std::cos(input.delta);
  const double ay_alg = (fyf * cos_delta + fyr) / vp.m;

  StateVec d;
  d.vy = -input.vx * state.r + ay_alg;
  d.r = (fyf * cos_delta * vp.lf - fyr * vp.lr) / vp.Jz;
  d.ay = (ay_alg - state.ay) / vp.tau_ay;
  return d;
}

StateVec step_euler(const StateVec& state, const InputVec& input, double dt,
                    const VehicleParams& vp, const TireParamSet& tires) {
  require(std::isfinite(dt) && dt > 0.0 && dt <= 0.1,
          "step_euler: dt must satisfy 0 < dt <= 0.1 s");
  const StateVec d = state_derivative(state, input, vp, tires);
  return {state.vy + dt * d.vy, state.r + dt * d.r, state.ay + dt * d.ay};
}

}  // namespace latdyn
