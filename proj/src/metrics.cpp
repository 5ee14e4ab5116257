#include "latdyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "latdyn/butterworth.hpp"

namespace latdyn {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string digest_hex(std::string_view text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

namespace {

double interp_channel(const std::vector<double>& ts, const std::vector<double>& ys, double t) {
  if (t <= ts.front()) return ys.front();
  if (t >= ts.back()) return ys.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double u = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return ys[lo] + u * (ys[hi] - ys[lo]);
}

}  // namespace

RunReport compute_run_report(const std::vector<EstimateRow>& estimates,
                             const TruthTrajectory& truth, double cutoff_hz,
                             const std::string& scenario_name) {
  if (estimates.empty()) throw std::invalid_argument("run report: no estimate rows");
  if (truth.samples.size() < 2) throw std::invalid_argument("run report: truth too short");

  const double dt = truth.samples[1].t - truth.samples[0].t;
  const double rate = 1.0 / dt;

  std::vector<double> ts(truth.samples.size());
  std::vector<double> vy(truth.samples.size()), r(truth.samples.size()), ay(truth.samples.size());
  for (std::size_t i = 0; i < truth.samples.size(); ++i) {
    ts[i] = truth.samples[i].t;
    vy[i] = truth.samples[i].state.vy;
    r[i] = truth.samples[i].state.r;
    ay[i] = truth.samples[i].state.ay;
  }
  vy = butterworth_reference(vy, cutoff_hz, rate);
  r = butterworth_reference(r, cutoff_hz, rate);
  ay = butterworth_reference(ay, cutoff_hz, rate);

  RunReport report;
  report.scenario = scenario_name;

  double se_vy = 0.0, se_r = 0.0, se_ay = 0.0;
  for (const EstimateRow& e : estimates) {
    const double dvy = e.vy - interp_channel(ts, vy, e.t);
    const double dr = e.r - interp_channel(ts, r, e.t);
    const double day = e.ay - interp_channel(ts, ay, e.t);
    se_vy += dvy * dvy;
    se_r += dr * dr;
    se_ay += day * day;
    report.vy.max_abs = std::max(report.vy.max_abs, std::abs(dvy));
    report.r.max_abs = std::max(report.r.max_abs, std::abs(dr));
    report.ay.max_abs = std::max(report.ay.max_abs, std::abs(day));
  }
  const double n = static_cast<double>(estimates.size());
  report.vy.rmse = std::sqrt(se_vy / n);
  report.r.rmse = std::sqrt(se_r / n);
  report.ay.rmse = std::sqrt(se_ay / n);
  return report;
}

std::string format_run_report(const RunReport& report) {
  std::ostringstream out;
  out << "scenario = " << report.scenario << "\n";
  out << "rmse_vy_mps = " << format_double(report.vy.rmse) << "\n";
  out << "rmse_r_radps = " << format_double(report.r.rmse) << "\n";
  out << "rmse_ay_mps2 = " << format_double(report.ay.rmse) << "\n";
  out << "max_abs_vy_mps = " << format_double(report.vy.max_abs) << "\n";
  out << "max_abs_r_radps = " << format_double(report.r.max_abs) << "\n";
  out << "max_abs_ay_mps2 = " << format_double(report.ay.max_abs) << "\n";
  out << "spike_rejections = " << report.spike_rejections << "\n";
  out << "skipped_records = " << report.skipped_records << "\n";
  if (report.mean_step_latency_s)
    out << "mean_step_latency_s = " << format_double(*report.mean_step_latency_s) << "\n";
  out << "config_digest = " << report.config_digest << "\n";
  return out.str();
}

}  // namespace latdyn
