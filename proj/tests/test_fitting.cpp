#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latdyn/fitting.hpp"
#include "latdyn/random.hpp"
#include "tire_oracle.hpp"

using namespace latdyn;

namespace {

double magic(double alpha, const PacejkaAxleParams& p) {
  const tire_oracle::Tire t{p.mu, p.B, p.C, p.E, p.Sv};
  return tire_oracle::magic(alpha, t);
}

std::vector<ForceSample> grid_samples(const PacejkaAxleParams& truth, int n, double span,
                                      double noise_sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ForceSample> samples;
  for (int i = 0; i < n; ++i) {
    const double alpha = -span + 2.0 * span * i / (n - 1);
    samples.push_back({alpha, magic(alpha, truth) + rng.gaussian(0.0, noise_sigma), 1.0});
  }
  return samples;
}

Scenario gentle_scenario() {
  Scenario sc;
  sc.name = "fit-log";
  sc.duration = 20.0;
  sc.dt_truth = 0.0005;
  sc.track = BankingMap::flat(0.0);
  sc.truth_tires = dry_tire_table();
  sc.speed_profile = {{0.0, 40.0}, {20.0, 40.0}};
  // slow sweep through both turn directions
  Profile steer;
  for (int i = 0; i <= 200; ++i) {
    const double t = 20.0 * i / 200.0;
    steer.emplace_back(t, 0.05 * std::sin(2.0 * M_PI * 0.2 * t));
  }
  sc.steering_profile = steer;
  return sc;
}

}  // namespace

TEST_CASE("extraction inverts the force chain on a noiseless log") {
  const Scenario sc = gentle_scenario();
  const TruthTrajectory traj = simulate_truth(sc);

  ExtractOptions opts;
  opts.prefilter_cutoff_hz = 0.0;  // exact finite differences on clean data
  const AxleForceSamples samples = extract_force_samples(traj.samples, sc.truth_vehicle, opts);

  CHECK(samples.front.size() > 10000);
  CHECK(samples.rear.size() > 10000);
  // Rows whose slip angle crosses zero inside the stencil straddle the
  // left/right Sv discontinuity and have no single reference branch; skip
  // that sliver.
  for (const ForceSample& s : samples.front) {
    if (std::abs(s.alpha) < 1e-4) continue;
    const auto& p = s.alpha >= 0 ? sc.truth_tires.front_left_turn : sc.truth_tires.front_right_turn;
    CHECK(std::abs(s.dy - magic(s.alpha, p)) < 1e-6);
  }
  for (const ForceSample& s : samples.rear) {
    if (std::abs(s.alpha) < 1e-4) continue;
    const auto& p = s.alpha >= 0 ? sc.truth_tires.rear_left_turn : sc.truth_tires.rear_right_turn;
    CHECK(std::abs(s.dy - magic(s.alpha, p)) < 1e-6);
  }
}

TEST_CASE("straight-line rows cluster at the vertical shift") {
  Scenario sc = gentle_scenario();
  sc.duration = 5.0;
  sc.steering_profile = {{0.0, 0.0}};
  // Same shift on both turn directions; an asymmetric Sv parks the
  // straight-line equilibrium on the selection discontinuity.
  sc.truth_tires.front_right_turn.Sv = sc.truth_tires.front_left_turn.Sv;
  sc.truth_tires.rear_right_turn.Sv = sc.truth_tires.rear_left_turn.Sv;
  const TruthTrajectory traj = simulate_truth(sc);

  ExtractOptions opts;
  opts.prefilter_cutoff_hz = 0.0;
  const AxleForceSamples samples = extract_force_samples(traj.samples, sc.truth_vehicle, opts);
  double mean_dy = 0.0;
  for (const ForceSample& s : samples.front) {
    CHECK(std::abs(s.alpha) < 0.01);
    mean_dy += s.dy;
  }
  mean_dy /= static_cast<double>(samples.front.size());
  // straight running drifts slowly, so dy hovers near Sv of the active set
  CHECK(std::abs(mean_dy - sc.truth_tires.front_left_turn.Sv) < 0.01);
}

TEST_CASE("slow rows are dropped") {
  Scenario sc = gentle_scenario();
  sc.duration = 4.0;
  const TruthTrajectory traj = simulate_truth(sc);

  std::vector<TruthSample> rows = traj.samples;
  for (std::size_t i = 0; i < 2000; ++i) rows[i].input.vx = 0.0;  // below vx_min

  ExtractOptions opts;
  opts.prefilter_cutoff_hz = 0.0;
  const AxleForceSamples kept = extract_force_samples(rows, sc.truth_vehicle, opts);
  // 8001 rows, minus 2 edge rows, minus every pair touching the 2000 slow rows
  CHECK(kept.front.size() == rows.size() - 2 - 2000);
}

TEST_CASE("too few usable rows is an error") {
  const Scenario sc = gentle_scenario();
  const TruthTrajectory traj = simulate_truth(sc);
  const std::vector<TruthSample> rows(traj.samples.begin(), traj.samples.begin() + 10);
  CHECK_THROWS_AS(extract_force_samples(rows, sc.truth_vehicle, {}), std::invalid_argument);
}

TEST_CASE("split by direction mirrors the selection rule") {
  std::vector<ForceSample> samples{{0.1, 1, 1}, {0.0, 2, 1}, {-0.1, 3, 1}, {0.2, 4, 1}};
  const auto [left, right] = split_by_direction(samples);
  CHECK(left.size() == 3);  // alpha = 0 goes left
  CHECK(right.size() == 1);
  for (const auto& s : left) CHECK(s.alpha >= 0.0);
  for (const auto& s : right) CHECK(s.alpha < 0.0);
}

TEST_CASE("fit returns the initial parameters on exact data") {
  const PacejkaAxleParams truth{1.6, 9.0, 1.4, 0.9, 0.03};
  const auto samples = grid_samples(truth, 100, 0.4, 0.0, 1);
  const FitResult res = fit_pacejka(samples, truth);
  CHECK(res.status == FitStatus::Converged);
  CHECK(res.rms_residual <= 1e-8);
  CHECK(res.params.mu == doctest::Approx(truth.mu).epsilon(1e-8));
  CHECK(res.params.B == doctest::Approx(truth.B).epsilon(1e-8));
  CHECK(res.params.C == doctest::Approx(truth.C).epsilon(1e-8));
  CHECK(res.params.E == doctest::Approx(truth.E).epsilon(1e-8));
  CHECK(res.params.Sv == doctest::Approx(truth.Sv).epsilon(1e-6));
}

TEST_CASE("noisy synthetic recovery lands within five percent") {
  const PacejkaAxleParams truth{1.6, 9.0, 1.4, 0.9, 0.03};
  const auto samples = grid_samples(truth, 1500, 0.5, 0.01, 42);

  PacejkaAxleParams init;
  init.mu = truth.mu * 1.3;
  init.B = truth.B * 0.7;
  init.C = truth.C * 1.3;
  init.E = truth.E * 0.7;
  init.Sv = truth.Sv * 1.3;

  const FitResult res = fit_pacejka(samples, init);
  CHECK(res.status == FitStatus::Converged);
  CHECK(std::abs(res.params.mu - truth.mu) / truth.mu <= 0.05);
  CHECK(std::abs(res.params.B - truth.B) / truth.B <= 0.05);
  CHECK(std::abs(res.params.C - truth.C) / truth.C <= 0.05);
  CHECK(std::abs(res.params.E - truth.E) / truth.E <= 0.05);
  CHECK(std::abs(res.params.Sv - truth.Sv) / truth.Sv <= 0.05);
  CHECK(res.rms_residual >= 0.008);
  CHECK(res.rms_residual <= 0.012);
}

TEST_CASE("degenerate data is signaled, never silently fitted") {
  std::vector<ForceSample> flat(50, ForceSample{0.0, 0.02, 1.0});
  const FitResult res = fit_pacejka(flat, PacejkaAxleParams{1.6, 9.0, 1.4, 0.5, 0.0});
  CHECK(res.status == FitStatus::Degenerate);

  std::vector<ForceSample> few{{0.1, 0.5, 1.0}, {-0.1, -0.5, 1.0}};
  CHECK(fit_pacejka(few, PacejkaAxleParams{1.6, 9.0, 1.4, 0.5, 0.0}).status ==
        FitStatus::Degenerate);
}

TEST_CASE("accepted steps never increase the cost") {
  const PacejkaAxleParams truth{1.7, 11.0, 1.35, 0.6, -0.01};
  const auto samples = grid_samples(truth, 150, 0.35, 0.02, 9);
  PacejkaAxleParams init{1.2, 16.0, 1.1, 0.1, 0.05};
  const FitResult res = fit_pacejka(samples, init);
  REQUIRE(res.cost_history.size() > 1);
  for (std::size_t i = 1; i < res.cost_history.size(); ++i)
    CHECK(res.cost_history[i] < res.cost_history[i - 1]);
}

TEST_CASE("scaling all weights leaves the fit unchanged") {
  const PacejkaAxleParams truth{1.6, 9.0, 1.4, 0.9, 0.03};
  auto samples = grid_samples(truth, 200, 0.4, 0.01, 77);
  const PacejkaAxleParams init{1.9, 7.0, 1.7, 0.5, 0.0};

  const FitResult a = fit_pacejka(samples, init);
  for (ForceSample& s : samples) s.weight *= 7.3;
  const FitResult b = fit_pacejka(samples, init);

  CHECK(std::abs(a.params.mu - b.params.mu) <= 1e-10);
  CHECK(std::abs(a.params.B - b.params.B) <= 1e-10);
  CHECK(std::abs(a.params.C - b.params.C) <= 1e-10);
  CHECK(std::abs(a.params.E - b.params.E) <= 1e-10);
  CHECK(std::abs(a.params.Sv - b.params.Sv) <= 1e-10);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("bound-stuck solutions are flagged distinctly") {
  // Data generated beyond the mu upper bound forces the fit onto it.
  PacejkaAxleParams truth{3.5, 9.0, 1.4, 0.5, 0.0};
  const auto samples = grid_samples(truth, 100, 0.4, 0.0, 3);
  PacejkaBounds bounds;  // mu <= 2.5
  const FitResult res = fit_pacejka(samples, PacejkaAxleParams{2.0, 9.0, 1.4, 0.5, 0.0}, bounds);
  CHECK(res.status == FitStatus::BoundStuck);
  CHECK(res.bound_active[0]);
  CHECK(res.params.mu == doctest::Approx(2.5));
}

TEST_CASE("invalid samples are rejected") {
  std::vector<ForceSample> bad{{0.1, 0.5, 0.0}};
  CHECK_THROWS_AS(fit_pacejka(bad, PacejkaAxleParams{}), std::invalid_argument);
}
