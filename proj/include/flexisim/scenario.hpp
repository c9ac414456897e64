#pragma once

#include "flexisim/gait.hpp"
#include "flexisim/robot.hpp"
#include "flexisim/spring_core.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexisim {

struct SimSettings {
  double dt = kDefaultTimeStep;
  Vec3 gravity{0.0, 0.0, -9.81};
  double drag = 0.0;
  ContactModel contact;
  int workers = 0;  //!< 0 = OpenMP default
};

struct SamplingSettings {
  double radius = 0.02;
  std::uint64_t seed = 1;
};

//! Optional overrides on top of a gait preset.
struct GaitOverrides {
  std::optional<double> theta_low;
  std::optional<double> theta_high;
  std::optional<double> stance_ratio;
  std::optional<double> period;
  std::optional<std::array<double, 4>> phase_offset;
  std::optional<std::array<double, 4>> direction_sign;
};

struct GaitSettings {
  GaitPreset preset = GaitPreset::Bounding;
  GaitOverrides overrides;
  double control_dt = 1.0e-3;
  int joint_update_divisor = 20;
  double settle_time = 0.5;  //!< posture hold before the gait clock starts

  GaitParams resolve() const;
};

struct RunSettings {
  double duration = 5.0;       //!< gait time after settling, s
  double stop_distance = 3.0;  //!< stop once this forward distance is covered; 0 disables
  double fall_tilt = std::numbers::pi / 3.0;
  double trajectory_interval = 0.01;
};

struct SweepSettings {
  std::vector<double> alphas;  //!< rad
  double period = 1.0;         //!< gait period for every sweep run
};

struct LegComparisonSettings {
  double solid_tip_diameter = 0.032;
  double tip_load = 1.0;  //!< N
};

struct BenchSettings {
  std::int64_t steps = 1000;
};

struct ScenarioConfig {
  RobotSpec robot;
  BuildOptions lattice;
  SimSettings sim;
  SamplingSettings sampling;
  GaitSettings gait;
  ControllerGains gains;
  MotorMap motor;
  RunSettings run;
  SweepSettings sweep;
  LegComparisonSettings legs;
  BenchSettings bench;

  //! Throws ConfigError on values that cannot produce a run.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, int line, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }  //!< 1-based, 0 when unknown

 private:
  std::string field_;
  int line_;
};

ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text);

//! Echo of the effective configuration as JSON text.
std::string config_to_json(const ScenarioConfig& config);

struct TrajectoryRow {
  double time = 0.0;  //!< since gait start
  Vec3 com;
  Vec3 up;
  double yaw = 0.0;      //!< unwrapped, relative to the heading at gait start
  double forward = 0.0;  //!< COM displacement along the initial heading
  std::array<double, 4> joint_angle{};
};

struct LocomotionMetrics {
  double avg_velocity_3m = 0.0;  //!< NaN unless the stop distance was crossed
  double time_to_3m = 0.0;       //!< NaN unless crossed
  double avg_velocity_window = 0.0;
  double body_lengths_per_s = 0.0;  //!< avg_velocity_window / body_length
  double yaw_rate = 0.0;
  double distance_traveled = 0.0;  //!< final forward displacement
  bool fell_over = false;
};

//! Metrics from a sampled trajectory alone.
LocomotionMetrics compute_metrics(const std::vector<TrajectoryRow>& rows, double body_length,
                                  double stop_distance, double fall_tilt);

struct ScenarioResult {
  LocomotionMetrics metrics;
  std::vector<TrajectoryRow> trajectory;
  std::size_t masses = 0;
  std::size_t springs = 0;
  std::int64_t steps = 0;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

struct SweepRow {
  double alpha = 0.0;
  double pace_velocity = 0.0;
  double bounding_velocity = 0.0;
  double yaw_rate = 0.0;  //!< magnitude of the rotation-run yaw rate
  std::string error;      //!< empty on success
};

//! One fresh robot per alpha: pace, bounding and rotation runs at the sweep
//! period. Rows are independent and may run on parallel workers.
std::vector<SweepRow> alpha_sweep(const ScenarioConfig& config, const std::vector<double>& alphas);

struct SweepTrend {
  double low_forward = 0.0;
  double high_forward = 0.0;
  double low_yaw = 0.0;
  double high_yaw = 0.0;
  bool forward_ok = false;  //!< low >= high
  bool yaw_ok = false;      //!< high >= low
};

//! Compares rows within `window` of the smallest alpha against rows within
//! `window` of the largest. Forward speed is the mean of pace and bounding.
SweepTrend sweep_trend(const std::vector<SweepRow>& rows, double window);

struct LegComparisonRow {
  std::string variant;
  bool hollow = false;
  double tip_diameter = 0.0;
  double velocity = 0.0;
  double tip_deflection = 0.0;
  std::string error;
};

std::vector<LegComparisonRow> leg_comparison(const ScenarioConfig& config);

ThroughputReport run_throughput(const ScenarioConfig& config, std::int64_t steps);

//! Absolute percentage error against measured reference velocities.
struct ReferenceRow {
  std::string label;
  double simulated = 0.0;
  double reference = 0.0;
  double ape_percent = 0.0;
};
std::vector<ReferenceRow> compare_reference(const std::filesystem::path& simulated,
                                            const std::filesystem::path& reference);

enum class ReportFormat { Csv, Human };

std::string format_number(double value);
std::string report(const LocomotionMetrics& metrics, double body_length, ReportFormat format);
std::string report(const std::vector<SweepRow>& rows, ReportFormat format);
std::string report(const std::vector<LegComparisonRow>& rows, ReportFormat format);
std::string report(const ThroughputReport& throughput, ReportFormat format);
std::string report(const std::vector<ReferenceRow>& rows, ReportFormat format);
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

}  // namespace flexisim
