#include "latdyn/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "latdyn/csv.hpp"
#include "latdyn/errors.hpp"
#include "latdyn/svg.hpp"

namespace latdyn {

namespace fs = std::filesystem;

EstimateRun run_estimator(Estimator& estimator, const std::vector<SensorRecord>& records) {
  if (records.empty()) throw std::invalid_argument("run_estimator: empty record list");

  EstimateRun run;
  std::chrono::steady_clock::duration total{};
  std::size_t steps = 0;

  std::size_t i = 0;
  double t_prev = records.front().t;
  bool first_group = true;
  while (i < records.size()) {
    std::size_t j = i;
    while (j < records.size() && records[j].t == records[i].t) ++j;

    std::vector<Measurement> measurements;
    for (std::size_t k = i; k < j; ++k)
      if (records[k].meas) measurements.push_back(*records[k].meas);

    StepInput input;
    input.t = records[i].t;
    input.delta = records[i].delta;
    input.vx = records[i].vx;
    input.ax = records[i].ax;
    input.s = records[i].s;

    const auto start = std::chrono::steady_clock::now();
    EstimatorOutput out;
    if (first_group) {
      out = estimator.update_only(input, measurements);
      first_group = false;
    } else {
      out = estimator.step(input, measurements, input.t - t_prev);
    }
    total += std::chrono::steady_clock::now() - start;
    ++steps;

    run.outputs.push_back(out);
    t_prev = input.t;
    i = j;
  }

  run.rejected_outliers = estimator.rejected_outliers();
  run.skipped_nonfinite = estimator.skipped_nonfinite();
  run.mean_step_latency_s =
      std::chrono::duration<double>(total).count() / static_cast<double>(steps);
  return run;
}

namespace {

int map_exception(const std::exception& e, std::ostream& log) {
  log << "error: " << e.what() << "\n";
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const NonConvergence*>(&e)) return kExitNoConvergence;
  return kExitParse;
}

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& log) {
  try {
    Scenario sc;
    NoiseModel nm;
    if (fs::exists(args.scenario)) {
      const Config cfg = Config::parse_file(args.scenario);
      sc = load_scenario(cfg);
      nm = load_noise_model(cfg);
    } else {
      sc = preset_scenario(args.scenario);
    }
    const TruthTrajectory truth = simulate_truth(sc);
    const auto records = synthesize_sensors(truth, nm, args.seed);

    fs::create_directories(args.out_dir);
    write_truth_csv((fs::path(args.out_dir) / "truth.csv").string(), truth);
    write_sensor_csv((fs::path(args.out_dir) / "sensors.csv").string(), records);
    write_banking_csv((fs::path(args.out_dir) / "banking.csv").string(), sc.track);

    log << "scenario " << sc.name << ": " << truth.samples.size() << " truth rows, "
        << records.size() << " sensor rows";
    if (truth.spin) log << " (spin at t=" << format_double(truth.spin_time) << " s)";
    log << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e, log);
  }
}

int cmd_estimate(const EstimateArgs& args, std::ostream& log) {
  try {
    Config cfg;
    if (!args.config_file.empty()) cfg = Config::parse_file(args.config_file);
    if (args.disable_lidar) cfg.set("estimator.use_lidar", "false");
    if (args.disable_imu) cfg.set("estimator.use_imu", "false");
    if (!args.banking_csv.empty()) cfg.set("estimator.banking_csv", args.banking_csv);

    const VehicleParams vp = load_vehicle_params(cfg);
    const TireParamSet tires = load_tire_set(cfg);
    const EstimatorConfig ec = load_estimator_config(cfg);
    const std::string banking_path = cfg.get_string("estimator.banking_csv", "");
    const BankingMap banking =
        banking_path.empty() ? BankingMap::flat() : read_banking_csv(banking_path);

    const auto records = read_sensor_csv(args.sensor_csv, args.max_bad_rows);

    Estimator estimator(vp, tires, banking, ec);
    const EstimateRun run = run_estimator(estimator, records);

    fs::create_directories(args.out_dir);
    const std::string estimate_path = (fs::path(args.out_dir) / "estimate.csv").string();
    write_estimate_csv(estimate_path, run.outputs);
    log << "wrote " << run.outputs.size() << " estimate rows to " << estimate_path << "\n";

    if (!args.truth_csv.empty()) {
      const TruthTrajectory truth = read_truth_csv(args.truth_csv);
      const auto estimates = read_estimate_csv(estimate_path);
      RunReport report = compute_run_report(estimates, truth, 5.0, args.scenario_name);
      report.spike_rejections = run.rejected_outliers;
      report.skipped_records = run.skipped_nonfinite;
      report.mean_step_latency_s = run.mean_step_latency_s;
      report.config_digest = digest_hex(cfg.canonical());

      const std::string report_text = format_run_report(report);
      std::ofstream rf((fs::path(args.out_dir) / "report.txt").string(), std::ios::binary);
      rf << report_text;
      log << report_text;

      if (args.svg) {
        SvgSeries est{"estimate", "#e07000", {}, {}};
        SvgSeries ref{"truth", "#3060c0", {}, {}};
        for (const auto& o : run.outputs) {
          est.x.push_back(o.timestamp);
          est.y.push_back(o.state.vy);
        }
        for (const auto& s : truth.samples) {
          ref.x.push_back(s.t);
          ref.y.push_back(s.state.vy);
        }
        write_line_chart_svg((fs::path(args.out_dir) / "vy.svg").string(),
                             "lateral velocity [m/s]", {ref, est});
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e, log);
  }
}

int cmd_fit(const FitArgs& args, std::ostream& log) {
  try {
    const TruthTrajectory truth = read_truth_csv(args.log_csv);

    Config cfg;
    if (!args.init_config.empty()) cfg = Config::parse_file(args.init_config);
    const VehicleParams vp = load_vehicle_params(cfg);
    const TireParamSet init = load_tire_set(cfg);

    ExtractOptions opts;
    opts.prefilter_cutoff_hz = args.prefilter_cutoff_hz;
    const AxleForceSamples samples = extract_force_samples(truth.samples, vp, opts);
    const auto [front_left, front_right] = split_by_direction(samples.front);
    const auto [rear_left, rear_right] = split_by_direction(samples.rear);

    struct Job {
      const char* name;
      const std::vector<ForceSample>* samples;
      PacejkaAxleParams init;
    };
    const Job jobs[] = {
        {"front_left_turn", &front_left, init.front_left_turn},
        {"front_right_turn", &front_right, init.front_right_turn},
        {"rear_left_turn", &rear_left, init.rear_left_turn},
        {"rear_right_turn", &rear_right, init.rear_right_turn},
    };

    std::ostringstream report;
    int exit_code = kExitOk;
    static const char* kParamNames[] = {"mu", "B", "C", "E", "Sv"};
    for (const Job& job : jobs) {
      const FitResult res = fit_pacejka(*job.samples, job.init);
      report << "[" << job.name << "]\n";
      report << "status = " << to_string(res.status) << "\n";
      report << "samples = " << job.samples->size() << "\n";
      report << "iterations = " << res.iterations << "\n";
      report << "rms_residual = " << format_double(res.rms_residual) << "\n";
      report << "initial = mu:" << format_double(job.init.mu) << " B:" << format_double(job.init.B)
             << " C:" << format_double(job.init.C) << " E:" << format_double(job.init.E)
             << " Sv:" << format_double(job.init.Sv) << "\n";
      report << "final = mu:" << format_double(res.params.mu) << " B:" << format_double(res.params.B)
             << " C:" << format_double(res.params.C) << " E:" << format_double(res.params.E)
             << " Sv:" << format_double(res.params.Sv) << "\n";
      report << "bounds_active =";
      bool any = false;
      for (int k = 0; k < 5; ++k)
        if (res.bound_active[static_cast<std::size_t>(k)]) {
          report << " " << kParamNames[k];
          any = true;
        }
      if (!any) report << " none";
      report << "\n\n";

      if (res.status == FitStatus::IterationCap || res.status == FitStatus::Degenerate)
        exit_code = std::max(exit_code, static_cast<int>(kExitNoConvergence));
      else if (res.status == FitStatus::BoundStuck)
        exit_code = std::max(exit_code, static_cast<int>(kExitBoundStuck));
    }

    if (!args.out_file.empty()) {
      const fs::path parent = fs::path(args.out_file).parent_path();
      if (!parent.empty()) fs::create_directories(parent);
      std::ofstream out(args.out_file, std::ios::binary);
      if (!out) throw std::invalid_argument("fit: cannot open '" + args.out_file + "'");
      out << report.str();
    }
    log << report.str();
    return exit_code;
  } catch (const std::exception& e) {
    return map_exception(e, log);
  }
}

int cmd_metrics(const MetricsArgs& args, std::ostream& log) {
  try {
    const auto estimates = read_estimate_csv(args.estimate_csv);
    const TruthTrajectory truth = read_truth_csv(args.truth_csv);
    RunReport report = compute_run_report(estimates, truth, args.cutoff_hz, args.scenario_name);

    Config effective;
    effective.set("metrics.cutoff_hz", format_double(args.cutoff_hz));
    report.config_digest = digest_hex(effective.canonical());
    log << format_run_report(report);

    if (args.svg) {
      SvgSeries est{"estimate", "#e07000", {}, {}};
      SvgSeries ref{"truth", "#3060c0", {}, {}};
      for (const auto& e : estimates) {
        est.x.push_back(e.t);
        est.y.push_back(e.vy);
      }
      for (const auto& s : truth.samples) {
        ref.x.push_back(s.t);
        ref.y.push_back(s.state.vy);
      }
      fs::create_directories(args.out_dir);
      write_line_chart_svg((fs::path(args.out_dir) / "vy.svg").string(),
                           "lateral velocity [m/s]", {ref, est});
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e, log);
  }
}

}  // namespace latdyn
