#pragma once

#include <utility>
#include <vector>

namespace latdyn {

/// Banking angle as a lookup table over arc-length along the track.
/// Lookups are periodic in track_length and linearly interpolated, including
/// across the lap seam.
class BankingMap {
 public:
  BankingMap() = default;

  /// samples: (s, theta) pairs with s strictly increasing in [0, track_length).
  BankingMap(std::vector<std::pair<double, double>> samples, double track_length);

  /// Map that returns `theta` everywhere (track_length 1 km, arbitrary).
  static BankingMap flat(double theta = 0.0);

  double lookup(double s) const;
  double track_length() const { return track_length_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

 private:
  std::vector<std::pair<double, double>> samples_{{0.0, 0.0}};
  double track_length_ = 1000.0;
};

}  // namespace latdyn
