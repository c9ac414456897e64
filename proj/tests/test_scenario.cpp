#include "flexisim/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace flexisim;

namespace {

std::vector<TrajectoryRow> straight_line(double speed, double dt, int n, Vec3 origin = {}, double heading = 0.0) {
  std::vector<TrajectoryRow> rows;
  const Vec3 dir{std::cos(heading), std::sin(heading), 0.0};
  for (int i = 0; i <= n; ++i) {
    TrajectoryRow r;
    r.time = i * dt;
    r.forward = speed * r.time;
    r.com = origin + dir * r.forward;
    r.up = {0, 0, 1};
    rows.push_back(r);
  }
  return rows;
}

ScenarioConfig short_config(double duration) {
  ScenarioConfig c;
  c.run.duration = duration;
  c.gait.settle_time = 0.1;
  c.sim.workers = 1;
  return c;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Metrics, SyntheticOneMetrePerSecond) {
  const auto rows = straight_line(1.0, 0.01, 400);
  const LocomotionMetrics m = compute_metrics(rows, 0.36, 3.0, std::numbers::pi / 3);
  EXPECT_NEAR(m.avg_velocity_3m, 1.0, 1e-12);
  EXPECT_NEAR(m.time_to_3m, 3.0, 1e-12);
  // avg_velocity_3m = 3 / t, so the product is 3 up to one rounding.
  EXPECT_LE(std::abs(m.avg_velocity_3m * m.time_to_3m - 3.0), std::nextafter(3.0, 4.0) - 3.0);
  EXPECT_NEAR(m.avg_velocity_window, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.body_lengths_per_s, m.avg_velocity_window / 0.36);
  EXPECT_FALSE(m.fell_over);
}

TEST(Metrics, CrossingInterpolatedBetweenSamples) {
  const auto rows = straight_line(0.7, 0.1, 60);
  const LocomotionMetrics m = compute_metrics(rows, 0.36, 3.0, 1.0);
  EXPECT_NEAR(m.time_to_3m, 3.0 / 0.7, 1e-12);
  EXPECT_LE(std::abs(m.avg_velocity_3m * m.time_to_3m - 3.0), 4.5e-16);
}

TEST(Metrics, NotReachedIsNan) {
  const LocomotionMetrics m = compute_metrics(straight_line(0.1, 0.1, 10), 0.36, 3.0, 1.0);
  EXPECT_TRUE(std::isnan(m.avg_velocity_3m));
  EXPECT_TRUE(std::isnan(m.time_to_3m));
  EXPECT_NEAR(m.distance_traveled, 0.1, 1e-12);
}

TEST(Metrics, FallDetectedFromUpVector) {
  auto rows = straight_line(0.1, 0.1, 10);
  rows[5].up = {std::sin(1.2), 0.0, std::cos(1.2)};
  EXPECT_TRUE(compute_metrics(rows, 0.36, 3.0, 1.0).fell_over);
  EXPECT_FALSE(compute_metrics(rows, 0.36, 3.0, 1.3).fell_over);
}

TEST(Metrics, YawRateFromUnwrappedYaw) {
  auto rows = straight_line(0.0, 0.1, 20);
  for (auto& r : rows) r.yaw = -0.5 * r.time;
  EXPECT_NEAR(compute_metrics(rows, 0.36, 0.0, 1.0).yaw_rate, -0.5, 1e-12);
}

TEST(Metrics, EmptyTrajectoryRejected) {
  EXPECT_THROW(compute_metrics({}, 0.36, 3.0, 1.0), std::invalid_argument);
}

TEST(Scenario, ZeroGainsStandStill) {
  ScenarioConfig c = short_config(1.0);
  c.gains.kp_pos = c.gains.kp_vel = c.gains.ki_vel = 0.0;
  const ScenarioResult r = run_scenario(c);
  EXPECT_LT(std::abs(r.metrics.avg_velocity_window), 0.01);
  EXPECT_FALSE(r.metrics.fell_over);
  EXPECT_EQ(r.steps, 20000);
}

TEST(Scenario, TrajectoryBytesIdenticalAcrossRunsAndWorkers) {
  ScenarioConfig c = short_config(0.3);
  const std::string a = trajectory_csv(run_scenario(c).trajectory);
  const std::string b = trajectory_csv(run_scenario(c).trajectory);
  c.sim.workers = 3;
  const std::string d = trajectory_csv(run_scenario(c).trajectory);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "time,com_x,com_y,com_z,up_x,up_y,up_z,yaw,forward,joint_fl,joint_fr,joint_bl,joint_br");
}

TEST(Scenario, HorizontalTranslationLeavesMetricsUnchanged) {
  // Move the whole world: the robot is built around the origin, so shift
  // the trajectory rows instead of the lattice and compare metrics.
  auto rows = straight_line(0.4, 0.01, 300, {0, 0, 0}, 0.3);
  auto moved = rows;
  for (auto& r : moved) r.com += Vec3{12.5, -7.25, 0.0};
  const LocomotionMetrics a = compute_metrics(rows, 0.36, 3.0, 1.0);
  const LocomotionMetrics b = compute_metrics(moved, 0.36, 3.0, 1.0);
  EXPECT_NEAR(a.avg_velocity_window, b.avg_velocity_window, 1e-9);
  EXPECT_NEAR(a.distance_traveled, b.distance_traveled, 1e-9);
}

TEST(Scenario, SimulatedWorldTranslationInvariant) {
  ScenarioConfig c = short_config(0.2);
  const ScenarioResult base = run_scenario(c);
  // A raised ground with everything lifted by the same amount is the same world.
  ScenarioConfig lifted = c;
  lifted.sim.contact.ground_height = 0.25;
  const ScenarioResult up = run_scenario(lifted);
  EXPECT_NEAR(base.metrics.avg_velocity_window, up.metrics.avg_velocity_window, 1e-9);
  EXPECT_NEAR(base.metrics.yaw_rate, up.metrics.yaw_rate, 1e-9);
  EXPECT_NEAR(base.metrics.distance_traveled, up.metrics.distance_traveled, 1e-9);
}

TEST(Report, FixedPrecisionAndStableColumns) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(NAN), "nan");
  LocomotionMetrics m;
  m.avg_velocity_window = 0.5;
  m.body_lengths_per_s = 0.5 / 0.36;
  const std::string csv = report(m, 0.36, ReportFormat::Csv);
  EXPECT_EQ(csv, report(m, 0.36, ReportFormat::Csv));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "avg_velocity_3m,time_to_3m,avg_velocity_window,body_lengths_per_s,yaw_rate,distance_traveled,fell_over");
  const std::string human = report(m, 0.36, ReportFormat::Human);
  EXPECT_NE(human.find("m/s"), std::string::npos);
  EXPECT_NE(human.find("BL/s"), std::string::npos);
}

TEST(Report, EmptySweepIsHeaderOnly) {
  EXPECT_EQ(report(std::vector<SweepRow>{}, ReportFormat::Csv), "alpha_deg,pace_velocity,bounding_velocity,yaw_rate,error\n");
}

TEST(Sweep, RowErrorsRecordedAndSweepContinues) {
  ScenarioConfig c = short_config(0.1);
  c.gait.settle_time = 0.0;
  const auto rows = alpha_sweep(c, {-1.0, 2.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_TRUE(std::isnan(rows[0].pace_velocity));
}

TEST(Sweep, TrendComparesEndWindows) {
  const double d = std::numbers::pi / 180;
  std::vector<SweepRow> rows{{0 * d, 0.4, 0.4, 1.0, ""}, {2 * d, 0.3, 0.3, 1.1, ""}, {15 * d, 9.0, 9.0, 0.0, ""},
                             {28 * d, 0.2, 0.2, 1.5, ""}, {30 * d, 0.1, 0.1, 1.7, ""}};
  const SweepTrend t = sweep_trend(rows, 4 * d);
  EXPECT_NEAR(t.low_forward, 0.35, 1e-12);
  EXPECT_NEAR(t.high_forward, 0.15, 1e-12);
  EXPECT_NEAR(t.low_yaw, 1.05, 1e-12);
  EXPECT_NEAR(t.high_yaw, 1.6, 1e-12);
  EXPECT_TRUE(t.forward_ok);
  EXPECT_TRUE(t.yaw_ok);
}

TEST(Legs, ComparisonHasTwoRowsHollowBendsMore) {
  ScenarioConfig c = short_config(0.2);
  const auto rows = leg_comparison(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].hollow);
  EXPECT_FALSE(rows[1].hollow);
  EXPECT_TRUE(rows[0].error.empty()) << rows[0].error;
  EXPECT_TRUE(rows[1].error.empty()) << rows[1].error;
  EXPECT_GT(rows[0].tip_deflection, rows[1].tip_deflection);
}

TEST(Config, DefaultsRoundTripAndEmptyFileIsDefault) {
  const ScenarioConfig c = parse_config("");
  EXPECT_EQ(c.sim.dt, 5e-5);
  EXPECT_EQ(c.gait.preset, GaitPreset::Bounding);
  EXPECT_NO_THROW(parse_config("robot:\n  leg_angle_deg: 20\ngait:\n  preset: pace\n"));
  EXPECT_NEAR(parse_config("robot:\n  leg_angle_deg: 20\n").robot.leg_angle_alpha, 20 * std::numbers::pi / 180,
              1e-15);
}

TEST(Config, UnknownKeyReportsLineAndField) {
  try {
    parse_config("sim:\n  dt: 5.0e-5\n  bogus: 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "sim.bogus");
  }
}

TEST(Config, TypeAndRangeErrorsReportLine) {
  try {
    parse_config("robot:\n  body_length: 0.36\n\ngait:\n  period: fast\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.field(), "gait.period");
  }
  try {
    parse_config("sim:\n  dt: -1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "sim.dt");
    EXPECT_EQ(e.line(), 2);
  }
  try {
    parse_config("gait:\n  preset: gallop\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "gait.preset");
  }
}

TEST(Config, LoadsShippedFixtures) {
  for (const char* name : {"default.yaml", "paper_scale.yaml", "sweep.yaml", "backflip.yaml"}) {
    const auto path = std::filesystem::path(FLEXISIM_CONFIG_DIR) / name;
    EXPECT_NO_THROW(load_config(path)) << name;
  }
  EXPECT_THROW(load_config("/nonexistent/flexisim.yaml"), std::exception);
}

TEST(Reference, AbsolutePercentageError) {
  const auto sim = temp_file("flexisim_sim.csv", "label,velocity\nbounding,0.55\npace,0.3\nextra,1\n");
  const auto ref = temp_file("flexisim_ref.csv", "label,velocity\nbounding,0.5\npace,0.4\n");
  const auto rows = compare_reference(sim, ref);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].label, "bounding");
  EXPECT_NEAR(rows[0].ape_percent, 10.0, 1e-9);
  EXPECT_NEAR(rows[1].ape_percent, 25.0, 1e-9);
}
