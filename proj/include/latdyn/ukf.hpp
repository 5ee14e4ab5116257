#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>

#include "latdyn/errors.hpp"

// Fixed-dimension unscented Kalman filter built from free functions over a
// value-semantic estimate. The process and measurement models are arbitrary
// callables; inputs are bound by the caller (usually a lambda capture).

namespace latdyn::ukf {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N, int M = N>
using Mat = Eigen::Matrix<double, N, M>;

/// Mean/covariance pair flowing through predict and update.
template <int N>
struct GaussianEstimate {
  Vec<N> mean = Vec<N>::Zero();
  Mat<N> cov = Mat<N>::Identity();
};

/// Scaled sigma-point calibration (Merwe parametrization).
struct SigmaConfig {
  double alpha = 0.1;  // spread of the points around the mean, (0, 1]
  double beta = 2.0;   // prior distribution shape weight (2 = Gaussian)
  double kappa = 0.0;  // secondary scale

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }

  void validate(int n) const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("SigmaConfig: alpha must be in (0, 1]");
    if (!(n + lambda(n) > 0.0))
      throw std::invalid_argument("SigmaConfig: N + lambda must be > 0");
  }
};

template <int N>
struct SigmaPoints {
  std::array<Vec<N>, 2 * N + 1> points;
  Eigen::Matrix<double, 2 * N + 1, 1> wm;  // mean weights, sum to 1
  Eigen::Matrix<double, 2 * N + 1, 1> wc;  // covariance weights
};

namespace detail {

template <int N>
Mat<N> symmetrized(const Mat<N>& a) {
  return 0.5 * (a + a.transpose());
}

// Cholesky factor of the (symmetrized) covariance, retried with a diagonal
// jitter ladder before giving up.
template <int N>
Mat<N> lower_sqrt(const Mat<N>& cov) {
  const Mat<N> sym = symmetrized<N>(cov);
  constexpr double jitters[] = {0.0, 1e-9, 1e-8, 1e-7};
  for (double j : jitters) {
    Eigen::LLT<Mat<N>> llt(sym + j * Mat<N>::Identity());
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw CovarianceFault("sigma points: covariance is not positive definite");
}

}  // namespace detail

/// 2N+1 scaled sigma points with mean and covariance weights. The points
/// reproduce the source mean exactly and the source covariance to roundoff.
template <int N>
SigmaPoints<N> generate_sigma_points(const GaussianEstimate<N>& est, const SigmaConfig& cfg) {
  cfg.validate(N);
  const double lambda = cfg.lambda(N);
  const double scale = N + lambda;

  const Mat<N> root = detail::lower_sqrt<N>(scale * est.cov);

  SigmaPoints<N> sp;
  sp.points[0] = est.mean;
  for (int i = 0; i < N; ++i) {
    sp.points[1 + i] = est.mean + root.col(i);
    sp.points[1 + N + i] = est.mean - root.col(i);
  }

  const double wi = 0.5 / scale;
  sp.wm.setConstant(wi);
  sp.wc.setConstant(wi);
  sp.wm(0) = lambda / scale;
  sp.wc(0) = lambda / scale + (1.0 - cfg.alpha * cfg.alpha + cfg.beta);
  return sp;
}

/// Unscented prediction: propagate sigma points through `f`, reassemble the
/// moments and add the diagonal process noise.
template <int N, class F>
GaussianEstimate<N> predict(const GaussianEstimate<N>& est, F&& f, const Vec<N>& q_diag,
                            const SigmaConfig& cfg) {
  const SigmaPoints<N> sp = generate_sigma_points<N>(est, cfg);

  std::array<Vec<N>, 2 * N + 1> transformed;
  for (int i = 0; i < 2 * N + 1; ++i) {
    transformed[i] = f(sp.points[i]);
    if (!transformed[i].allFinite())
      throw NumericError("predict: process function returned a non-finite state");
  }

  GaussianEstimate<N> out;
  out.mean = Vec<N>::Zero();
  for (int i = 0; i < 2 * N + 1; ++i) out.mean += sp.wm(i) * transformed[i];

  out.cov = q_diag.asDiagonal();
  for (int i = 0; i < 2 * N + 1; ++i) {
    const Vec<N> d = transformed[i] - out.mean;
    out.cov += sp.wc(i) * (d * d.transpose());
  }
  out.cov = detail::symmetrized<N>(out.cov);
  return out;
}

/// Predicted measurement moments, kept separate from the correction so a
/// caller can gate on the innovation statistics before committing.
template <int N, int M>
struct MeasurementMoments {
  Vec<M> z_pred;
  Mat<M> innovation_cov;   // P_zz, includes the measurement noise
  Mat<N, M> cross_cov;     // P_xz
};

template <int M, int N, class H>
MeasurementMoments<N, M> measurement_moments(const GaussianEstimate<N>& est, H&& h,
                                             const Vec<M>& r_diag, const SigmaConfig& cfg) {
  const SigmaPoints<N> sp = generate_sigma_points<N>(est, cfg);

  std::array<Vec<M>, 2 * N + 1> z;
  for (int i = 0; i < 2 * N + 1; ++i) {
    z[i] = h(sp.points[i]);
    if (!z[i].allFinite())
      throw NumericError("update: measurement function returned a non-finite value");
  }

  MeasurementMoments<N, M> mm;
  mm.z_pred = Vec<M>::Zero();
  for (int i = 0; i < 2 * N + 1; ++i) mm.z_pred += sp.wm(i) * z[i];

  mm.innovation_cov = r_diag.asDiagonal();
  mm.cross_cov = Mat<N, M>::Zero();
  for (int i = 0; i < 2 * N + 1; ++i) {
    const Vec<M> dz = z[i] - mm.z_pred;
    mm.innovation_cov += sp.wc(i) * (dz * dz.transpose());
    mm.cross_cov += sp.wc(i) * ((sp.points[i] - est.mean) * dz.transpose());
  }
  mm.innovation_cov = detail::symmetrized<M>(mm.innovation_cov);
  return mm;
}

/// Mahalanobis norm of the innovation under P_zz. Used for outlier gating.
template <int N, int M>
double innovation_distance(const MeasurementMoments<N, M>& mm, const Vec<M>& z) {
  const Vec<M> nu = z - mm.z_pred;
  const double d2 = nu.dot(mm.innovation_cov.ldlt().solve(nu));
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

/// Kalman correction from precomputed moments.
template <int N, int M>
GaussianEstimate<N> apply_update(const GaussianEstimate<N>& est,
                                 const MeasurementMoments<N, M>& mm, const Vec<M>& z) {
  if (!z.allFinite()) throw std::invalid_argument("update: measurement is not finite");

  Eigen::SelfAdjointEigenSolver<Mat<M>> eig(mm.innovation_cov);
  const double ev_min = eig.eigenvalues().minCoeff();
  const double ev_max = eig.eigenvalues().maxCoeff();
  if (!(ev_min > 0.0) || ev_max / ev_min > 1e12)
    throw SingularInnovation("update: innovation covariance is singular");

  const Mat<N, M> gain =
      mm.innovation_cov.ldlt().solve(mm.cross_cov.transpose()).transpose();

  GaussianEstimate<N> out;
  out.mean = est.mean + gain * (z - mm.z_pred);
  out.cov = detail::symmetrized<N>(est.cov - gain * mm.innovation_cov * gain.transpose());
  return out;
}

/// One full unscented update with measurement function `h`, measurement `z`
/// and diagonal noise `r_diag`.
template <int M, int N, class H>
GaussianEstimate<N> update(const GaussianEstimate<N>& est, H&& h, const Vec<M>& z,
                           const Vec<M>& r_diag, const SigmaConfig& cfg) {
  if (!z.allFinite()) throw std::invalid_argument("update: measurement is not finite");
  const auto mm = measurement_moments<M>(est, std::forward<H>(h), r_diag, cfg);
  return apply_update(est, mm, z);
}

}  // namespace latdyn::ukf
