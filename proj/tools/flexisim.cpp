// flexisim command line: single runs, leg-angle sweeps, leg comparison,
// throughput benchmark and comparison against measured velocities.

#include "flexisim/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#ifndef FLEXISIM_VERSION
#define FLEXISIM_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace flexisim;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir = "flexisim-out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format = "human";
};

ScenarioConfig load(const Common& common) {
  ScenarioConfig c = load_config(common.config_path);
  if (common.seed) c.sampling.seed = *common.seed;
  if (common.threads) c.sim.workers = *common.threads;
  c.validate();
  return c;
}

ReportFormat format_of(const Common& common) {
  return common.format == "csv" ? ReportFormat::Csv : ReportFormat::Human;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_manifest(const Common& common, const ScenarioConfig& c, const std::string& command,
                    const std::vector<std::string>& outputs) {
  nlohmann::ordered_json m;
  m["tool"] = "flexisim";
  m["version"] = FLEXISIM_VERSION;
  m["command"] = command;
  m["config_file"] = common.config_path;
  m["seed"] = c.sampling.seed;
  m["workers"] = resolve_workers(c.sim.workers);
  m["compiler"] = __VERSION__;
#ifdef _OPENMP
  m["openmp"] = _OPENMP;
#endif
  m["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  m["config"] = nlohmann::ordered_json::parse(config_to_json(c));
  m["outputs"] = outputs;
  write_file(fs::path(common.out_dir) / "manifest.json", m.dump(2) + "\n");
}

int cmd_run(const Common& common) {
  const ScenarioConfig c = load(common);
  const ScenarioResult r = run_scenario(c);
  fs::create_directories(common.out_dir);
  write_file(fs::path(common.out_dir) / "metrics.csv", report(r.metrics, c.robot.body_length, ReportFormat::Csv));
  write_file(fs::path(common.out_dir) / "trajectory.csv", trajectory_csv(r.trajectory));
  write_manifest(common, c, "run", {"metrics.csv", "trajectory.csv"});
  if (format_of(common) == ReportFormat::Human)
    std::cout << "gait " << to_string(c.gait.preset) << ", " << r.masses << " masses, " << r.springs
              << " springs, " << r.steps << " steps\n";
  std::cout << report(r.metrics, c.robot.body_length, format_of(common));
  return 0;
}

int cmd_sweep(const Common& common, const std::vector<double>& alphas_deg) {
  ScenarioConfig c = load(common);
  std::vector<double> alphas = c.sweep.alphas;
  if (!alphas_deg.empty()) {
    alphas.clear();
    for (double a : alphas_deg) alphas.push_back(a * std::numbers::pi / 180.0);
  }
  const auto rows = alpha_sweep(c, alphas);
  fs::create_directories(common.out_dir);
  write_file(fs::path(common.out_dir) / "sweep.csv", report(rows, ReportFormat::Csv));
  c.sweep.alphas = alphas;
  write_manifest(common, c, "sweep-alpha", {"sweep.csv"});
  std::cout << report(rows, format_of(common));
  if (format_of(common) == ReportFormat::Human && rows.size() >= 2) {
    const SweepTrend t = sweep_trend(rows, 4.0 * std::numbers::pi / 180.0);
    std::cout << "forward velocity, low vs high alpha: " << format_number(t.low_forward) << " vs "
              << format_number(t.high_forward) << " m/s\n"
              << "rotation rate, low vs high alpha:    " << format_number(t.low_yaw) << " vs "
              << format_number(t.high_yaw) << " rad/s\n";
  }
  for (const auto& r : rows)
    if (!r.error.empty()) return 1;
  return 0;
}

int cmd_legs(const Common& common) {
  const ScenarioConfig c = load(common);
  const auto rows = leg_comparison(c);
  fs::create_directories(common.out_dir);
  write_file(fs::path(common.out_dir) / "legs.csv", report(rows, ReportFormat::Csv));
  write_manifest(common, c, "compare-legs", {"legs.csv"});
  std::cout << report(rows, format_of(common));
  for (const auto& r : rows)
    if (!r.error.empty()) return 1;
  return 0;
}

int cmd_bench(const Common& common, std::optional<std::int64_t> steps) {
  const ScenarioConfig c = load(common);
  const ThroughputReport t = run_throughput(c, steps.value_or(c.bench.steps));
  fs::create_directories(common.out_dir);
  write_file(fs::path(common.out_dir) / "bench.csv", report(t, ReportFormat::Csv));
  write_manifest(common, c, "bench", {"bench.csv"});
  std::cout << report(t, format_of(common));
  return 0;
}

int cmd_reference(const Common& common, const std::string& simulated, const std::string& reference) {
  const auto rows = compare_reference(simulated, reference);
  std::cout << report(rows, format_of(common));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexisim: mass-spring soft quadruped simulator"};
  app.set_version_flag("--version", FLEXISIM_VERSION);
  app.require_subcommand(1);

  Common common;
  app.add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "Override the sampling seed");
  app.add_option("--threads", common.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--format", common.format, "Report format on stdout")
      ->check(CLI::IsMember({"human", "csv"}))
      ->capture_default_str();

  auto* run = app.add_subcommand("run", "Run the configured gait and record metrics and trajectory");
  run->add_option("config", common.config_path, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);

  std::vector<double> alphas_deg;
  auto* sweep = app.add_subcommand("sweep-alpha", "Pace, bounding and rotation runs per leg angle");
  sweep->add_option("config", common.config_path, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--alphas", alphas_deg, "Leg angles in degrees (overrides sweep.alphas_deg)");

  auto* legs = app.add_subcommand("compare-legs", "Hollow versus solid leg: velocity and tip deflection");
  legs->add_option("config", common.config_path, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);

  std::optional<std::int64_t> steps;
  auto* bench = app.add_subcommand("bench", "Spring-evaluation throughput of the physics step");
  bench->add_option("config", common.config_path, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);
  bench->add_option("--steps", steps, "Number of physics steps (overrides bench.steps)")
      ->check(CLI::PositiveNumber);

  std::string simulated, reference;
  auto* ref = app.add_subcommand("compare-reference",
                                 "Absolute percentage error of simulated against measured velocities");
  ref->add_option("simulated", simulated, "CSV with label,velocity rows")->required()->check(CLI::ExistingFile);
  ref->add_option("reference", reference, "CSV with label,velocity rows")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(common);
    if (*sweep) return cmd_sweep(common, alphas_deg);
    if (*legs) return cmd_legs(common);
    if (*bench) return cmd_bench(common, steps);
    if (*ref) return cmd_reference(common, simulated, reference);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
