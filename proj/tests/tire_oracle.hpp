#pragma once

#include <cmath>

// Test-only reference implementation of the slip / force / load chain,
// written straight from the formulas and kept independent of the library
// code paths it cross-checks.

namespace tire_oracle {

constexpr double kG = 9.80665;

struct Tire {
  double mu, B, C, E, Sv;
};

struct Vehicle {
  double m, Jz, lf, lr, h, clf, clr, sfr, vx_min, tau;
};

inline double magic(double alpha, const Tire& t) {
  const double x = t.B * alpha;
  return t.Sv + t.mu * std::sin(t.C * std::atan(x - t.E * (x - std::atan(x))));
}

struct Deriv {
  double vy_dot, r_dot, ay_dot;
  double alpha_f, alpha_r, dy_f, dy_r, fzf, fzr, fyf, fyr;
};

inline Deriv derive(double vy, double r, double ay, double delta, double vx, double ax,
                    double theta, const Vehicle& v, const Tire& fl, const Tire& fr,
                    const Tire& rl, const Tire& rr) {
  Deriv d;
  const double vxe = vx > v.vx_min ? vx : v.vx_min;
  d.alpha_f = -std::atan((vy + r * v.lf) / vxe) + delta;
  d.alpha_r = std::atan(-(vy - r * v.lr) / vxe);

  d.dy_f = magic(d.alpha_f, d.alpha_f >= 0 ? fl : fr);
  d.dy_r = magic(d.alpha_r, d.alpha_r >= 0 ? rl : rr);

  const double bank = v.m * ay * std::tan(theta);
  const double dlong = v.m * ax * v.h / (v.lf + v.lr);
  d.fzf = v.m * kG * v.sfr + v.clf * vx * vx + v.sfr * bank - dlong;
  d.fzr = v.m * kG * (1.0 - v.sfr) + v.clr * vx * vx + (1.0 - v.sfr) * bank + dlong;
  if (d.fzf < 0) d.fzf = 0;
  if (d.fzr < 0) d.fzr = 0;

  d.fyf = d.dy_f * d.fzf;
  d.fyr = d.dy_r * d.fzr;

  const double ay_alg = (d.fyf * std::cos(delta) + d.fyr) / v.m;
  d.vy_dot = -vx * r + ay_alg;
  d.r_dot = (d.fyf * std::cos(delta) * v.lf - d.fyr * v.lr) / v.Jz;
  d.ay_dot = (ay_alg - ay) / v.tau;
  return d;
}

}  // namespace tire_oracle
