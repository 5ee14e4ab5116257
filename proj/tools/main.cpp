#include <CLI11.hpp>
#include <iostream>

#include "latdyn/commands.hpp"

// Lateral-dynamics toolkit front end. Every flag can also be set through an
// environment variable with the LATDYN_ prefix; explicit flags win.

int main(int argc, char** argv) {
  CLI::App app{"latdyn: single-track lateral dynamics estimation toolkit"};
  app.require_subcommand(1);

  latdyn::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate truth and sensor logs");
  simulate->add_option("scenario", sim.scenario, "preset name (oval, chicane, wet) or scenario file")
      ->required()
      ->envname("LATDYN_SCENARIO");
  simulate->add_option("--out", sim.out_dir, "output directory")->envname("LATDYN_OUT");
  simulate->add_option("--seed", sim.seed, "random seed")->envname("LATDYN_SEED");

  latdyn::EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "run the filter over a sensor log");
  estimate->add_option("sensors", est.sensor_csv, "sensor CSV")->required();
  estimate->add_option("--config", est.config_file, "config file")->envname("LATDYN_CONFIG");
  estimate->add_option("--truth", est.truth_csv, "truth CSV for the run report")
      ->envname("LATDYN_TRUTH");
  estimate->add_option("--banking", est.banking_csv, "banking map CSV")
      ->envname("LATDYN_BANKING");
  estimate->add_option("--out", est.out_dir, "output directory")->envname("LATDYN_OUT");
  estimate->add_flag("--disable-lidar", est.disable_lidar, "ignore lidar measurements");
  estimate->add_flag("--disable-imu", est.disable_imu, "ignore imu measurements");
  estimate->add_flag("--svg", est.svg, "also write a vy chart");
  estimate->add_option("--max-bad-rows", est.max_bad_rows, "malformed row tolerance");
  estimate->add_option("--name", est.scenario_name, "run label for the report");

  latdyn::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit tire macro-parameters from a truth log");
  fit_cmd->add_option("log", fit.log_csv, "truth-schema CSV")->required();
  fit_cmd->add_option("--config", fit.init_config, "initial guesses ([tires.*] sections)")
      ->envname("LATDYN_CONFIG");
  fit_cmd->add_option("--out", fit.out_file, "report file")->envname("LATDYN_OUT");
  fit_cmd->add_option("--prefilter-hz", fit.prefilter_cutoff_hz,
                      "low-pass cutoff before differentiation (0 disables)");

  latdyn::MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "recompute a run report from files");
  metrics->add_option("estimate", met.estimate_csv, "estimate CSV")->required();
  metrics->add_option("truth", met.truth_csv, "truth CSV")->required();
  metrics->add_option("--cutoff-hz", met.cutoff_hz, "reference filter cutoff");
  metrics->add_option("--name", met.scenario_name, "run label for the report");
  metrics->add_flag("--svg", met.svg, "also write a vy chart");
  metrics->add_option("--out", met.out_dir, "output directory for charts")->envname("LATDYN_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : latdyn::kExitParse;
  }

  if (simulate->parsed()) return latdyn::cmd_simulate(sim, std::cout);
  if (estimate->parsed()) return latdyn::cmd_estimate(est, std::cout);
  if (fit_cmd->parsed()) return latdyn::cmd_fit(fit, std::cout);
  if (metrics->parsed()) return latdyn::cmd_metrics(met, std::cout);
  return latdyn::kExitParse;
}
