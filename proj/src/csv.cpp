#include "latdyn/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace latdyn {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw std::invalid_argument("csv: cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("csv: bad numeric field '" + s + "'");
  return v;
}

void expect_header(std::ifstream& in, const std::string& expected, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw std::invalid_argument("csv: '" + path + "' has unexpected header '" + line + "'");
}

constexpr const char* kTruthHeader =
    "t_s,vy_mps,r_radps,ay_mps2,delta_rad,vx_mps,ax_mps2,theta_rad,s_m";
constexpr const char* kSensorHeader = "t_s,delta_rad,vx_mps,ax_mps2,s_m,src,m1,m2";
constexpr const char* kBankingHeader = "s_m,theta_rad";
constexpr const char* kEstimateHeader =
    "t_s,vy_est,r_est,ay_est,var_vy,var_r,var_ay,beta_rad,understeer_rad";

}  // namespace

void write_truth_csv(const std::string& path, const TruthTrajectory& traj) {
  std::ofstream out = open_out(path);
  out << kTruthHeader << "\n";
  for (const TruthSample& s : traj.samples) {
    out << format_double(s.t) << ',' << format_double(s.state.vy) << ','
        << format_double(s.state.r) << ',' << format_double(s.state.ay) << ','
        << format_double(s.input.delta) << ',' << format_double(s.input.vx) << ','
        << format_double(s.input.ax) << ',' << format_double(s.input.theta) << ','
        << format_double(s.s) << "\n";
  }
}

TruthTrajectory read_truth_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_header(in, kTruthHeader, path);
  TruthTrajectory traj;
  // Lap length is not recoverable from the file; disable wrap handling.
  traj.track_length = std::numeric_limits<double>::infinity();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw std::invalid_argument("csv: bad truth row '" + line + "'");
    TruthSample s;
    s.t = to_double(f[0]);
    s.state = {to_double(f[1]), to_double(f[2]), to_double(f[3])};
    s.input = {to_double(f[4]), to_double(f[5]), to_double(f[6]), to_double(f[7])};
    s.s = to_double(f[8]);
    s.s_unwrapped = s.s;
    traj.samples.push_back(s);
  }
  if (traj.samples.empty()) throw std::invalid_argument("csv: '" + path + "' has no rows");
  return traj;
}

void write_sensor_csv(const std::string& path, const std::vector<SensorRecord>& records) {
  std::ofstream out = open_out(path);
  out << kSensorHeader << "\n";
  for (const SensorRecord& r : records) {
    out << format_double(r.t) << ',' << format_double(r.delta) << ',' << format_double(r.vx)
        << ',' << format_double(r.ax) << ',' << format_double(r.s) << ',';
    if (!r.meas) {
      out << "-,,";
    } else {
      out << (r.meas->source == MeasurementSource::LidarOdom ? "lidar" : "imu") << ','
          << format_double(r.meas->m1) << ',' << format_double(r.meas->m2);
    }
    out << "\n";
  }
}

std::vector<SensorRecord> read_sensor_csv(const std::string& path, int max_bad_rows) {
  std::ifstream in = open_in(path);
  expect_header(in, kSensorHeader, path);
  std::vector<SensorRecord> records;
  std::string line;
  int bad = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto f = split(line);
      if (f.size() != 8) throw std::invalid_argument("csv: wrong field count");
      SensorRecord r;
      r.t = to_double(f[0]);
      r.delta = to_double(f[1]);
      r.vx = to_double(f[2]);
      r.ax = to_double(f[3]);
      r.s = to_double(f[4]);
      if (f[5] == "-") {
        if (!f[6].empty() || !f[7].empty())
          throw std::invalid_argument("csv: payload on measurement-free row");
      } else {
        Measurement m;
        m.timestamp = r.t;
        if (f[5] == "lidar") m.source = MeasurementSource::LidarOdom;
        else if (f[5] == "imu") m.source = MeasurementSource::Imu;
        else throw std::invalid_argument("csv: unknown src '" + f[5] + "'");
        m.m1 = to_double(f[6]);
        m.m2 = to_double(f[7]);
        r.meas = m;
      }
      if (!records.empty() && r.t < records.back().t)
        throw std::invalid_argument("csv: timestamps must be monotone");
      records.push_back(r);
    } catch (const std::invalid_argument&) {
      if (++bad > max_bad_rows)
        throw std::invalid_argument("csv: '" + path + "': too many malformed rows (row: '" +
                                    line + "')");
    }
  }
  if (records.empty()) throw std::invalid_argument("csv: '" + path + "' has no usable rows");
  return records;
}

// The final row is a sentinel at s = track_length carrying the seam value
// theta(0); it closes the periodic map and lets the reader recover the lap
// length.
void write_banking_csv(const std::string& path, const BankingMap& map) {
  std::ofstream out = open_out(path);
  out << kBankingHeader << "\n";
  for (const auto& [s, theta] : map.samples())
    out << format_double(s) << ',' << format_double(theta) << "\n";
  out << format_double(map.track_length()) << ','
      << format_double(map.samples().front().second) << "\n";
}

BankingMap read_banking_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_header(in, kBankingHeader, path);
  std::vector<std::pair<double, double>> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 2) throw std::invalid_argument("csv: bad banking row '" + line + "'");
    samples.emplace_back(to_double(f[0]), to_double(f[1]));
  }
  if (samples.size() < 2)
    throw std::invalid_argument("csv: '" + path + "' needs samples plus the closing row");
  const double track_length = samples.back().first;
  samples.pop_back();
  return BankingMap(samples, track_length);
}

void write_estimate_csv(const std::string& path, const std::vector<EstimatorOutput>& outputs) {
  std::ofstream out = open_out(path);
  out << kEstimateHeader << "\n";
  for (const EstimatorOutput& o : outputs) {
    out << format_double(o.timestamp) << ',' << format_double(o.state.vy) << ','
        << format_double(o.state.r) << ',' << format_double(o.state.ay) << ','
        << format_double(o.cov_diag(0)) << ',' << format_double(o.cov_diag(1)) << ','
        << format_double(o.cov_diag(2)) << ',' << format_double(o.beta) << ','
        << format_double(o.understeer) << "\n";
  }
}

std::vector<EstimateRow> read_estimate_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_header(in, kEstimateHeader, path);
  std::vector<EstimateRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw std::invalid_argument("csv: bad estimate row '" + line + "'");
    rows.push_back({to_double(f[0]), to_double(f[1]), to_double(f[2]), to_double(f[3]),
                    to_double(f[4]), to_double(f[5]), to_double(f[6]), to_double(f[7]),
                    to_double(f[8])});
  }
  if (rows.empty()) throw std::invalid_argument("csv: '" + path + "' has no rows");
  return rows;
}

}  // namespace latdyn
