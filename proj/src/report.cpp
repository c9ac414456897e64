#include "flexisim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace flexisim {

namespace {

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

double degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string report(const LocomotionMetrics& m, double body_length, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "avg_velocity_3m,time_to_3m,avg_velocity_window,body_lengths_per_s,yaw_rate,distance_traveled,"
          "fell_over\n"
       << format_number(m.avg_velocity_3m) << ',' << format_number(m.time_to_3m) << ','
       << format_number(m.avg_velocity_window) << ',' << format_number(m.body_lengths_per_s) << ','
       << format_number(m.yaw_rate) << ',' << format_number(m.distance_traveled) << ','
       << (m.fell_over ? "true" : "false") << '\n';
    return os.str();
  }
  os << "average velocity:      " << format_number(m.avg_velocity_window) << " m/s ("
     << format_number(m.body_lengths_per_s) << " BL/s)\n";
  if (std::isnan(m.avg_velocity_3m)) {
    os << "3 m velocity:          not reached\n";
  } else {
    os << "3 m velocity:          " << format_number(m.avg_velocity_3m) << " m/s ("
       << format_number(m.avg_velocity_3m / body_length) << " BL/s) in " << format_number(m.time_to_3m) << " s\n";
  }
  os << "yaw rate:              " << format_number(m.yaw_rate) << " rad/s\n"
     << "distance traveled:     " << format_number(m.distance_traveled) << " m\n"
     << "fell over:             " << (m.fell_over ? "yes" : "no") << '\n';
  return os.str();
}

std::string report(const std::vector<SweepRow>& rows, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "alpha_deg,pace_velocity,bounding_velocity,yaw_rate,error\n";
    for (const SweepRow& r : rows)
      os << format_number(degrees(r.alpha)) << ',' << format_number(r.pace_velocity) << ','
         << format_number(r.bounding_velocity) << ',' << format_number(r.yaw_rate) << ',' << csv_text(r.error)
         << '\n';
    return os.str();
  }
  os << "alpha [deg]  pace [m/s]  bounding [m/s]  rotation [rad/s]\n";
  for (const SweepRow& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%11.9g  %10.4f  %14.4f  %16.4f", degrees(r.alpha), r.pace_velocity,
                  r.bounding_velocity, r.yaw_rate);
    os << line;
    if (!r.error.empty()) os << "  error: " << r.error;
    os << '\n';
  }
  return os.str();
}

std::string report(const std::vector<LegComparisonRow>& rows, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "variant,hollow,tip_diameter,velocity,tip_deflection,error\n";
    for (const LegComparisonRow& r : rows)
      os << r.variant << ',' << (r.hollow ? "true" : "false") << ',' << format_number(r.tip_diameter) << ','
         << format_number(r.velocity) << ',' << format_number(r.tip_deflection) << ',' << csv_text(r.error) << '\n';
    return os.str();
  }
  for (const LegComparisonRow& r : rows) {
    os << r.variant << " leg (tip " << format_number(r.tip_diameter * 1000.0) << " mm): ";
    if (!r.error.empty()) {
      os << "error: " << r.error << '\n';
      continue;
    }
    os << format_number(r.velocity) << " m/s, tip deflection " << format_number(r.tip_deflection * 1000.0)
       << " mm\n";
  }
  return os.str();
}

std::string report(const ThroughputReport& t, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "masses,springs,steps,spring_evaluations,wall_seconds,evaluations_per_second,steps_per_second,"
          "real_time_factor,dt,workers\n"
       << t.masses << ',' << t.springs << ',' << t.steps << ',' << t.spring_evaluations << ','
       << format_number(t.wall_seconds) << ',' << format_number(t.evaluations_per_second) << ','
       << format_number(t.steps_per_second) << ',' << format_number(t.real_time_factor) << ','
       << format_number(t.dt) << ',' << t.workers << '\n';
    return os.str();
  }
  os << "masses / springs:      " << t.masses << " / " << t.springs << '\n'
     << "steps:                 " << t.steps << " at dt = " << format_number(t.dt) << " s\n"
     << "spring evaluations:    " << t.spring_evaluations << '\n'
     << "wall time:             " << format_number(t.wall_seconds) << " s on " << t.workers << " worker(s)\n"
     << "evaluations/s:         " << format_number(t.evaluations_per_second) << '\n'
     << "steps/s:               " << format_number(t.steps_per_second) << '\n'
     << "real-time factor:      " << format_number(t.real_time_factor) << '\n';
  return os.str();
}

std::string report(const std::vector<ReferenceRow>& rows, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "label,simulated,reference,ape_percent\n";
    for (const ReferenceRow& r : rows)
      os << csv_text(r.label) << ',' << format_number(r.simulated) << ',' << format_number(r.reference) << ','
         << format_number(r.ape_percent) << '\n';
    return os.str();
  }
  for (const ReferenceRow& r : rows)
    os << r.label << ": simulated " << format_number(r.simulated) << " m/s, measured " << format_number(r.reference)
       << " m/s, error " << format_number(r.ape_percent) << " %\n";
  return os.str();
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os << "time,com_x,com_y,com_z,up_x,up_y,up_z,yaw,forward,joint_fl,joint_fr,joint_bl,joint_br\n";
  for (const TrajectoryRow& r : rows) {
    os << format_number(r.time) << ',' << format_number(r.com.x) << ',' << format_number(r.com.y) << ','
       << format_number(r.com.z) << ',' << format_number(r.up.x) << ',' << format_number(r.up.y) << ','
       << format_number(r.up.z) << ',' << format_number(r.yaw) << ',' << format_number(r.forward);
    for (double a : r.joint_angle) os << ',' << format_number(a);
    os << '\n';
  }
  return os.str();
}

}  // namespace flexisim
