#include "flexisim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace flexisim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Robot build_for(const ScenarioConfig& c) {
  BuildOptions options = c.lattice;
  options.ground_height = c.sim.contact.ground_height;
  Robot robot = build_robot(c.robot, options, c.sampling.radius, c.sampling.seed);
  robot.state.dt = c.sim.dt;
  robot.state.gravity = c.sim.gravity;
  robot.state.drag = c.sim.drag;
  robot.state.contact = c.sim.contact;
  return robot;
}

std::int64_t ticks(double seconds, double control_dt) {
  return static_cast<std::int64_t>(std::llround(seconds / control_dt));
}

Vec3 horizontal_heading(const Vec3& forward) {
  const Vec3 h{forward.x, forward.y, 0.0};
  const double n = norm(h);
  return n > 0.0 ? h / n : Vec3{1.0, 0.0, 0.0};
}

ScenarioResult simulate(const ScenarioConfig& c, const GaitParams& gait, int workers) {
  Robot robot = build_for(c);
  Stepper stepper(workers);

  GaitController ctl;
  ctl.gait = gait;
  ctl.gains = c.gains;
  ctl.motor = c.motor;
  ctl.control_dt = c.gait.control_dt;
  ctl.joint_update_divisor = c.gait.joint_update_divisor;
  ctl.reset_phases();

  // Settle into the stance posture with the gait clock frozen.
  ctl.hold_phase = true;
  for (std::int64_t t = 0, n = ticks(c.gait.settle_time, ctl.control_dt); t < n; ++t)
    drive_joints(robot.state, stepper, robot.joints, ctl);
  ctl.hold_phase = false;

  const Vec3 origin = center_of_mass(robot.state);
  const Vec3 heading = horizontal_heading(body_frame(robot).forward);
  double yaw_prev = std::atan2(heading.y, heading.x);
  double yaw = 0.0;

  ScenarioResult result;
  auto sample = [&](double time) {
    const BodyFrame f = body_frame(robot);
    const Vec3 h = horizontal_heading(f.forward);
    const double absolute = std::atan2(h.y, h.x);
    yaw += wrap_to_pi(absolute - yaw_prev);
    yaw_prev = absolute;

    TrajectoryRow row;
    row.time = time;
    row.com = center_of_mass(robot.state);
    row.up = f.up;
    row.yaw = yaw;
    row.forward = dot(row.com - origin, heading);
    for (std::size_t i = 0; i < 4; ++i) row.joint_angle[i] = robot.joints[i].unwrapped_angle;
    result.trajectory.push_back(row);
    return row.forward;
  };

  const std::int64_t total = ticks(c.run.duration, ctl.control_dt);
  const std::int64_t stride = ticks(c.run.trajectory_interval, ctl.control_dt);
  const std::int64_t settle_steps = robot.state.step_count;
  sample(0.0);
  for (std::int64_t t = 1; t <= total; ++t) {
    drive_joints(robot.state, stepper, robot.joints, ctl);
    if (t % stride == 0 || t == total) {
      const double forward = sample(static_cast<double>(t) * ctl.control_dt);
      if (c.run.stop_distance > 0.0 && forward >= c.run.stop_distance) break;
    }
  }

  result.metrics = compute_metrics(result.trajectory, c.robot.body_length, c.run.stop_distance, c.run.fall_tilt);
  result.masses = robot.state.masses.size();
  result.springs = robot.state.springs.size();
  result.steps = robot.state.step_count - settle_steps;
  return result;
}

// Sweep and comparison runs keep the configured template shape but take the
// phase arrangement from the named preset.
GaitParams sweep_gait(const ScenarioConfig& c, GaitPreset preset, double period) {
  GaitSettings g = c.gait;
  g.preset = preset;
  g.overrides.phase_offset.reset();
  g.overrides.direction_sign.reset();
  g.overrides.period = period;
  return g.resolve();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::map<std::string, double> read_label_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::map<std::string, double> values;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (number == 1 && cells.size() >= 2 && cells[0] == "label") continue;
    if (cells.size() != 2) {
      std::ostringstream os;
      os << path.string() << ":" << number << ": expected 'label,velocity'";
      throw std::runtime_error(os.str());
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("trailing characters");
      values[cells[0]] = v;
    } catch (const std::exception&) {
      std::ostringstream os;
      os << path.string() << ":" << number << ": '" << cells[1] << "' is not a number";
      throw std::runtime_error(os.str());
    }
  }
  return values;
}

}  // namespace

LocomotionMetrics compute_metrics(const std::vector<TrajectoryRow>& rows, double body_length, double stop_distance,
                                  double fall_tilt) {
  if (rows.empty()) throw std::invalid_argument("compute_metrics: empty trajectory");
  if (!(body_length > 0.0)) throw std::invalid_argument("compute_metrics: body length must be positive");

  const TrajectoryRow& first = rows.front();
  const TrajectoryRow& last = rows.back();
  LocomotionMetrics m;
  m.avg_velocity_3m = kNaN;
  m.time_to_3m = kNaN;

  if (stop_distance > 0.0) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double target = first.forward + stop_distance;
      if (rows[i].forward < target) continue;
      const TrajectoryRow& a = rows[i - 1];
      const TrajectoryRow& b = rows[i];
      const double crossing = a.time + (target - a.forward) * (b.time - a.time) / (b.forward - a.forward);
      m.time_to_3m = crossing - first.time;
      m.avg_velocity_3m = stop_distance / m.time_to_3m;
      break;
    }
  }

  const double span = last.time - first.time;
  m.distance_traveled = last.forward - first.forward;
  if (span > 0.0) {
    m.avg_velocity_window = m.distance_traveled / span;
    m.yaw_rate = (last.yaw - first.yaw) / span;
  }
  m.body_lengths_per_s = m.avg_velocity_window / body_length;

  const double min_up = std::cos(fall_tilt);
  m.fell_over = std::any_of(rows.begin(), rows.end(), [&](const TrajectoryRow& r) { return r.up.z < min_up; });
  return m;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  return simulate(config, config.gait.resolve(), config.sim.workers);
}

std::vector<SweepRow> alpha_sweep(const ScenarioConfig& config, const std::vector<double>& alphas) {
  config.validate();
  std::vector<SweepRow> rows(alphas.size());
  const std::int64_t n = static_cast<std::int64_t>(alphas.size());

#pragma omp parallel for num_threads(resolve_workers(config.sim.workers)) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    SweepRow& row = rows[i];
    row.alpha = alphas[i];
    try {
      if (!(alphas[i] >= 0.0 && alphas[i] <= std::numbers::pi / 3.0))
        throw std::invalid_argument("alpha must lie in [0, 60] degrees");
      ScenarioConfig c = config;
      c.robot.leg_angle_alpha = alphas[i];
      const double period = config.sweep.period;
      row.pace_velocity = simulate(c, sweep_gait(c, GaitPreset::Pace, period), 1).metrics.avg_velocity_window;
      row.bounding_velocity =
          simulate(c, sweep_gait(c, GaitPreset::Bounding, period), 1).metrics.avg_velocity_window;
      row.yaw_rate = std::abs(simulate(c, sweep_gait(c, GaitPreset::TurnRight, period), 1).metrics.yaw_rate);
    } catch (const std::exception& e) {
      row.pace_velocity = row.bounding_velocity = row.yaw_rate = kNaN;
      row.error = e.what();
    }
  }
  return rows;
}

SweepTrend sweep_trend(const std::vector<SweepRow>& rows, double window) {
  SweepTrend t;
  double lo = INFINITY, hi = -INFINITY;
  for (const SweepRow& r : rows)
    if (r.error.empty()) {
      lo = std::min(lo, r.alpha);
      hi = std::max(hi, r.alpha);
    }
  if (!(lo < hi)) return t;

  int n_low = 0, n_high = 0;
  for (const SweepRow& r : rows) {
    if (!r.error.empty()) continue;
    const double forward = 0.5 * (r.pace_velocity + r.bounding_velocity);
    if (r.alpha <= lo + window) {
      t.low_forward += forward;
      t.low_yaw += r.yaw_rate;
      ++n_low;
    }
    if (r.alpha >= hi - window) {
      t.high_forward += forward;
      t.high_yaw += r.yaw_rate;
      ++n_high;
    }
  }
  t.low_forward /= n_low;
  t.low_yaw /= n_low;
  t.high_forward /= n_high;
  t.high_yaw /= n_high;
  t.forward_ok = t.low_forward >= t.high_forward;
  t.yaw_ok = t.high_yaw >= t.low_yaw;
  return t;
}

std::vector<LegComparisonRow> leg_comparison(const ScenarioConfig& config) {
  config.validate();
  std::vector<LegComparisonRow> rows(2);
  rows[0].variant = "hollow";
  rows[0].hollow = true;
  rows[0].tip_diameter = config.robot.leg_tip_diameter;
  rows[1].variant = "solid";
  rows[1].hollow = false;
  rows[1].tip_diameter = config.legs.solid_tip_diameter;

#pragma omp parallel for num_threads(resolve_workers(config.sim.workers)) schedule(dynamic, 1)
  for (int i = 0; i < 2; ++i) {
    LegComparisonRow& row = rows[i];
    try {
      ScenarioConfig c = config;
      c.robot.leg_hollow = row.hollow;
      c.robot.leg_tip_diameter = row.tip_diameter;
      c.validate();
      row.velocity = simulate(c, c.gait.resolve(), 1).metrics.avg_velocity_window;
      row.tip_deflection =
          leg_tip_deflection(c.robot, c.lattice, c.sampling.radius, c.sampling.seed, c.legs.tip_load);
    } catch (const std::exception& e) {
      row.velocity = row.tip_deflection = kNaN;
      row.error = e.what();
    }
  }
  return rows;
}

ThroughputReport run_throughput(const ScenarioConfig& config, std::int64_t steps) {
  config.validate();
  Robot robot = build_for(config);
  return throughput_benchmark(robot.state, steps, config.sim.workers);
}

std::vector<ReferenceRow> compare_reference(const std::filesystem::path& simulated,
                                            const std::filesystem::path& reference) {
  const auto sim = read_label_values(simulated);
  const auto ref = read_label_values(reference);
  std::vector<ReferenceRow> rows;
  for (const auto& [label, value] : ref) {
    const auto it = sim.find(label);
    if (it == sim.end()) continue;
    if (value == 0.0) throw std::runtime_error("reference velocity for '" + label + "' is zero");
    rows.push_back({label, it->second, value, std::abs(it->second - value) / std::abs(value) * 100.0});
  }
  if (rows.empty()) throw std::runtime_error("no labels in common between the simulated and reference files");
  return rows;
}

}  // namespace flexisim
