#include "latdyn/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latdyn/butterworth.hpp"

namespace latdyn {

AxleForceSamples extract_force_samples(const std::vector<TruthSample>& rows,
                                       const VehicleParams& vp, const ExtractOptions& opts) {
  vp.validate();
  if (rows.size() < 3) throw std::invalid_argument("extract_force_samples: log too short");

  const double dt = rows[1].t - rows[0].t;
  if (!(dt > 0.0)) throw std::invalid_argument("extract_force_samples: bad timestamps");

  // Every channel entering the inversion gets the same prefilter, so the
  // shared group delay cancels out of the (alpha, dy) pairing.
  const std::size_t n = rows.size();
  std::vector<double> vy_ch(n), r_ch(n), ay_ch(n), delta_ch(n), vx_ch(n), ax_ch(n), theta_ch(n);
  for (std::size_t i = 0; i < n; ++i) {
    vy_ch[i] = rows[i].state.vy;
    r_ch[i] = rows[i].state.r;
    ay_ch[i] = rows[i].state.ay;
    delta_ch[i] = rows[i].input.delta;
    vx_ch[i] = rows[i].input.vx;
    ax_ch[i] = rows[i].input.ax;
    theta_ch[i] = rows[i].input.theta;
  }
  if (opts.prefilter_cutoff_hz > 0.0) {
    const double rate = 1.0 / dt;
    for (auto* ch : {&vy_ch, &r_ch, &ay_ch, &delta_ch, &vx_ch, &ax_ch, &theta_ch})
      *ch = butterworth_reference(*ch, opts.prefilter_cutoff_hz, rate);
  }

  AxleForceSamples out;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    // The centered stencil at row i equals the exact state derivative at the
    // midpoint of rows i-1 and i for explicit-Euler logs, so the algebraic
    // quantities are taken from that midpoint as well.
    if (vx_ch[i - 1] < vp.vx_min || vx_ch[i] < vp.vx_min) continue;

    const double r_dot = (r_ch[i + 1] - r_ch[i - 1]) / (2.0 * dt);
    const double vy_dot = (vy_ch[i + 1] - vy_ch[i - 1]) / (2.0 * dt);

    StateVec state_mid;
    state_mid.vy = 0.5 * (vy_ch[i - 1] + vy_ch[i]);
    state_mid.r = 0.5 * (r_ch[i - 1] + r_ch[i]);
    state_mid.ay = 0.5 * (ay_ch[i - 1] + ay_ch[i]);
    InputVec input_mid;
    input_mid.delta = 0.5 * (delta_ch[i - 1] + delta_ch[i]);
    input_mid.vx = 0.5 * (vx_ch[i - 1] + vx_ch[i]);
    input_mid.ax = 0.5 * (ax_ch[i - 1] + ax_ch[i]);
    input_mid.theta = 0.5 * (theta_ch[i - 1] + theta_ch[i]);

    const double ay_alg = vy_dot + input_mid.vx * state_mid.r;

    const auto [alpha_f, alpha_r] = slip_angles(state_mid, input_mid, vp);
    const auto [fzf, fzr] = normal_loads(input_mid, state_mid.ay, vp);
    if (fzf < opts.fz_floor || fzr < opts.fz_floor) continue;

    // Force balance: A = Fyf cos(delta), B = Fyr.
    const double a = (vp.Jz * r_dot + vp.m * ay_alg * vp.lr) / vp.wheelbase();
    const double b = vp.m * ay_alg - a;
    const double fyf = a / std::cos(input_mid.delta);
    const double fyr = b;

    if (!std::isfinite(fyf) || !std::isfinite(fyr)) continue;
    out.front.push_back({alpha_f, fyf / fzf, 1.0});
    out.rear.push_back({alpha_r, fyr / fzr, 1.0});
  }

  if (out.front.size() < opts.min_samples || out.rear.size() < opts.min_samples)
    throw std::invalid_argument("extract_force_samples: too few usable rows");
  return out;
}

std::pair<std::vector<ForceSample>, std::vector<ForceSample>> split_by_direction(
    const std::vector<ForceSample>& samples) {
  std::pair<std::vector<ForceSample>, std::vector<ForceSample>> out;
  for (const ForceSample& s : samples)
    (s.alpha >= 0.0 ? out.first : out.second).push_back(s);
  return out;
}

namespace {

using Params = Eigen::Matrix<double, 5, 1>;

Params to_vec(const PacejkaAxleParams& p) {
  return {p.mu, p.B, p.C, p.E, p.Sv};
}

PacejkaAxleParams from_vec(const Params& v) {
  return {v(0), v(1), v(2), v(3), v(4)};
}

double model_dy(double alpha, const Params& p) {
  const double ba = p(1) * alpha;
  return p(4) + p(0) * std::sin(p(2) * std::atan(ba - p(3) * (ba - std::atan(ba))));
}

Eigen::VectorXd residuals(const std::vector<ForceSample>& samples, const Params& p) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    r(static_cast<Eigen::Index>(i)) =
        std::sqrt(samples[i].weight) * (model_dy(samples[i].alpha, p) - samples[i].dy);
  return r;
}

Params clamp_params(Params p, const Params& lo, const Params& hi) {
  for (int k = 0; k < 5; ++k) p(k) = std::clamp(p(k), lo(k), hi(k));
  return p;
}

}  // namespace

FitResult fit_pacejka(const std::vector<ForceSample>& samples_in, const PacejkaAxleParams& init,
                      const PacejkaBounds& bounds) {
  FitResult result;
  result.params = init;

  // Identifiability guard: enough samples with a real spread in alpha.
  double alpha_min = std::numeric_limits<double>::infinity();
  double alpha_max = -alpha_min;
  double weight_max = 0.0;
  for (const ForceSample& s : samples_in) {
    if (!(s.weight > 0.0) || !std::isfinite(s.alpha) || !std::isfinite(s.dy))
      throw std::invalid_argument("fit_pacejka: invalid sample");
    alpha_min = std::min(alpha_min, s.alpha);
    alpha_max = std::max(alpha_max, s.alpha);
    weight_max = std::max(weight_max, s.weight);
  }
  if (samples_in.size() < 20 || alpha_max - alpha_min < 1e-3) {
    result.status = FitStatus::Degenerate;
    return result;
  }

  // Weights are relative: normalize by the largest so a uniform rescale
  // changes neither the path of the optimizer nor the reported residual.
  std::vector<ForceSample> samples = samples_in;
  for (ForceSample& s : samples) s.weight /= weight_max;

  const Params lo = to_vec(bounds.lo);
  const Params hi = to_vec(bounds.hi);
  Params p = clamp_params(to_vec(init), lo, hi);

  Eigen::VectorXd r = residuals(samples, p);
  double cost = r.squaredNorm();
  result.cost_history.push_back(cost);

  double lambda = 1e-3;
  double last_rel_drop = std::numeric_limits<double>::infinity();
  constexpr int kMaxIter = 200;
  int iter = 0;
  bool converged = false;

  for (; iter < kMaxIter; ++iter) {
    // Forward-difference Jacobian; switch to backward at the upper bound.
    Eigen::MatrixXd jac(r.size(), 5);
    for (int k = 0; k < 5; ++k) {
      double h = 1e-6 * std::max(std::abs(p(k)), 1e-2);
      if (p(k) + h > hi(k)) h = -h;
      Params pk = p;
      pk(k) += h;
      jac.col(k) = (residuals(samples, pk) - r) / h;
    }

    const Eigen::Matrix<double, 5, 5> hess = jac.transpose() * jac;
    const Params grad = jac.transpose() * r;
    const double diag_max = hess.diagonal().maxCoeff();
    if (!(diag_max > 0.0)) {
      result.status = FitStatus::Degenerate;
      break;
    }

    bool accepted = false;
    while (lambda <= 1e12) {
      Eigen::Matrix<double, 5, 5> damped = hess;
      for (int k = 0; k < 5; ++k)
        damped(k, k) += lambda * std::max(hess(k, k), 1e-12 * diag_max);
      const Params step = damped.ldlt().solve(-grad);
      const Params p_new = clamp_params(p + step, lo, hi);
      const Eigen::VectorXd r_new = residuals(samples, p_new);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        last_rel_drop = (cost - cost_new) / std::max(cost, 1e-300);
        p = p_new;
        r = r_new;
        cost = cost_new;
        result.cost_history.push_back(cost);
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }

    if (!accepted || last_rel_drop < 1e-8 || cost == 0.0) {
      converged = true;
      ++iter;
      break;
    }
  }

  result.params = from_vec(p);
  result.iterations = iter;
  result.rms_residual =
      std::sqrt(cost / static_cast<double>(samples.size()));

  for (int k = 0; k < 5; ++k) {
    const double span = hi(k) - lo(k);
    result.bound_active[static_cast<std::size_t>(k)] =
        p(k) <= lo(k) + 1e-9 * span || p(k) >= hi(k) - 1e-9 * span;
  }
  const bool any_bound = std::any_of(result.bound_active.begin(), result.bound_active.end(),
                                     [](bool b) { return b; });

  if (result.status == FitStatus::Degenerate) return result;
  if (!converged && last_rel_drop > 1e-6)
    result.status = FitStatus::IterationCap;
  else if (any_bound)
    result.status = FitStatus::BoundStuck;
  else
    result.status = FitStatus::Converged;
  return result;
}

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::IterationCap: return "iteration_cap";
    case FitStatus::BoundStuck: return "bound_stuck";
    case FitStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace latdyn
