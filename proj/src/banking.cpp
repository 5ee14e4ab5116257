#include "latdyn/banking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latdyn {

BankingMap::BankingMap(std::vector<std::pair<double, double>> samples, double track_length)
    : samples_(std::move(samples)), track_length_(track_length) {
  if (!(std::isfinite(track_length_) && track_length_ > 0.0))
    throw std::invalid_argument("BankingMap: track_length must be > 0");
  if (samples_.empty()) throw std::invalid_argument("BankingMap: needs at least one sample");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& [s, theta] = samples_[i];
    if (!(std::isfinite(s) && std::isfinite(theta)))
      throw std::invalid_argument("BankingMap: non-finite sample");
    if (s < 0.0 || s >= track_length_)
      throw std::invalid_argument("BankingMap: sample s must be in [0, track_length)");
    if (i > 0 && s <= samples_[i - 1].first)
      throw std::invalid_argument("BankingMap: samples must be strictly increasing in s");
  }
}

BankingMap BankingMap::flat(double theta) {
  return BankingMap({{0.0, theta}}, 1000.0);
}

double BankingMap::lookup(double s) const {
  double w = std::fmod(s, track_length_);
  if (w < 0.0) w += track_length_;

  if (samples_.size() == 1) return samples_.front().second;

  // Last bracketing interval wraps around the seam.
  auto it = std::upper_bound(samples_.begin(), samples_.end(), w,
                             [](double v, const auto& p) { return v < p.first; });
  double s0, t0, s1, t1;
  if (it == samples_.begin() || it == samples_.end()) {
    s0 = samples_.back().first;
    t0 = samples_.back().second;
    s1 = samples_.front().first + track_length_;
    t1 = samples_.front().second;
    if (it == samples_.begin()) w += track_length_;
  } else {
    s0 = (it - 1)->first;
    t0 = (it - 1)->second;
    s1 = it->first;
    t1 = it->second;
  }
  const double u = (w - s0) / (s1 - s0);
  return t0 + u * (t1 - t0);
}

}  // namespace latdyn
