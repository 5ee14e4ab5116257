#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace latdyn {

/// First-order Butterworth low-pass, discretized with the bilinear transform
/// (frequency prewarped so the -3 dB point lands exactly at the cutoff).
/// Applied forward only; state is initialized to the first input sample so a
/// constant signal passes through unchanged.
class Butterworth1 {
 public:
  Butterworth1(double cutoff_hz, double rate_hz) {
    if (!(cutoff_hz > 0.0) || !(rate_hz > 0.0))
      throw std::invalid_argument("Butterworth1: cutoff and rate must be > 0");
    if (cutoff_hz >= 0.5 * rate_hz)
      throw std::invalid_argument("Butterworth1: cutoff must be below Nyquist");
    const double k = std::tan(std::numbers::pi * cutoff_hz / rate_hz);
    b0_ = k / (1.0 + k);
    b1_ = b0_;
    a1_ = (k - 1.0) / (k + 1.0);
  }

  double b0() const { return b0_; }
  double b1() const { return b1_; }
  double a1() const { return a1_; }

  double step(double x) {
    if (!primed_) {
      x_prev_ = x;
      y_prev_ = x;
      primed_ = true;
      return x;
    }
    const double y = b0_ * x + b1_ * x_prev_ - a1_ * y_prev_;
    x_prev_ = x;
    y_prev_ = y;
    return y;
  }

  void reset() { primed_ = false; }

 private:
  double b0_, b1_, a1_;
  double x_prev_ = 0.0, y_prev_ = 0.0;
  bool primed_ = false;
};

/// Filters a whole channel forward in time.
inline std::vector<double> butterworth_reference(const std::vector<double>& channel,
                                                 double cutoff_hz, double rate_hz) {
  Butterworth1 filt(cutoff_hz, rate_hz);
  std::vector<double> out;
  out.reserve(channel.size());
  for (double x : channel) out.push_back(filt.step(x));
  return out;
}

}  // namespace latdyn
