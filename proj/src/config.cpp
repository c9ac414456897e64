#include "flexisim/scenario.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace flexisim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kRpm = kTwoPi / 60.0;

int line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.is_null() ? 0 : mark.line + 1;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads one mapping and remembers which keys were consumed so the rest can
// be reported as unknown.
class MapReader {
 public:
  MapReader(YAML::Node node, std::string path, std::map<std::string, int>& lines)
      : node_(std::move(node)), path_(std::move(path)), lines_(lines) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_, line_of(node_), "expected a mapping");
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (const auto v = take(key)) out = convert<T>(*v, join(path_, key));
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (const auto v = take(key)) out = convert<T>(*v, join(path_, key));
  }

  void read_scaled(const std::string& key, double& out, double scale) {
    if (const auto v = take(key)) out = convert<double>(*v, join(path_, key)) * scale;
  }

  void read_scaled(const std::string& key, std::optional<double>& out, double scale) {
    if (const auto v = take(key)) out = convert<double>(*v, join(path_, key)) * scale;
  }

  MapReader child(const std::string& key) {
    return MapReader(take(key).value_or(YAML::Node()), join(path_, key), lines_);
  }

  void finish() const {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (used_.count(key) == 0) throw ConfigError(join(path_, key), line_of(kv.first), "unknown key");
    }
  }

 private:
  std::optional<YAML::Node> take(const std::string& key) {
    if (!node_.IsMap()) return std::nullopt;
    const YAML::Node& lookup = node_;  // the non-const operator[] would insert the key
    YAML::Node v = lookup[key];
    if (!v.IsDefined()) return std::nullopt;
    used_.insert(key);
    lines_[join(path_, key)] = line_of(v);
    return v;
  }

  template <class T>
  T convert(const YAML::Node& v, const std::string& field) {
    try {
      if constexpr (std::is_same_v<T, Vec3>) {
        if (!v.IsSequence() || v.size() != 3) throw ConfigError(field, line_of(v), "expected a list of 3 numbers");
        return Vec3{v[0].as<double>(), v[1].as<double>(), v[2].as<double>()};
      } else if constexpr (std::is_same_v<T, std::array<double, 4>>) {
        if (!v.IsSequence() || v.size() != 4)
          throw ConfigError(field, line_of(v), "expected a list of 4 numbers (FL, FR, BL, BR)");
        return {v[0].as<double>(), v[1].as<double>(), v[2].as<double>(), v[3].as<double>()};
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.IsSequence()) throw ConfigError(field, line_of(v), "expected a list of numbers");
        return v.as<std::vector<double>>();
      } else {
        if (!v.IsScalar()) throw ConfigError(field, line_of(v), "expected a scalar");
        return v.as<T>();
      }
    } catch (const YAML::Exception&) {
      const char* what = std::is_same_v<T, bool>          ? "expected true or false"
                         : std::is_same_v<T, std::string> ? "expected a string"
                         : std::is_integral_v<T>          ? "expected an integer"
                                                          : "expected a number";
      throw ConfigError(field, line_of(v), what);
    }
  }

  YAML::Node node_;
  std::string path_;
  std::map<std::string, int>& lines_;
  std::set<std::string> used_;
};

void read_robot(MapReader m, RobotSpec& r) {
  m.read("body_length", r.body_length);
  m.read("body_width", r.body_width);
  m.read("body_height", r.body_height);
  m.read("body_wall", r.body_wall);
  m.read("total_mass", r.total_mass);
  m.read("leg_step_length", r.leg_step_length);
  m.read("leg_length", r.leg_length);
  m.read("leg_tip_diameter", r.leg_tip_diameter);
  m.read("leg_shoulder_diameter", r.leg_shoulder_diameter);
  m.read("leg_inner_tip_diameter", r.leg_inner_tip_diameter);
  m.read("leg_inner_shoulder_diameter", r.leg_inner_shoulder_diameter);
  m.read("leg_hollow", r.leg_hollow);
  m.read("leg_mass", r.leg_mass);
  m.read_scaled("leg_angle_deg", r.leg_angle_alpha, kDeg);
  std::string tilt;
  m.read("leg_tilt", tilt);
  if (tilt == "radial")
    r.leg_tilt = LegTilt::Radial;
  else if (tilt == "inward")
    r.leg_tilt = LegTilt::FeetInward;
  else if (tilt == "outward")
    r.leg_tilt = LegTilt::FeetOutward;
  else if (!tilt.empty())
    throw ConfigError("robot.leg_tilt", 0, "expected radial, outward or inward, got '" + tilt + "'");
  m.read("motor_mass", r.motor_mass);
  m.read("coupler_mass", r.coupler_mass);
  m.read("leg_x_offset", r.leg_x_offset);
  m.read("joint_height", r.joint_height);
  m.read("leg_gap", r.leg_gap);
  m.read("motor_inset", r.motor_inset);
  m.finish();
}

void read_lattice(MapReader m, BuildOptions& o) {
  m.read("connect_factor", o.connect_factor);
  m.read("body_modulus", o.body_modulus);
  m.read("leg_modulus", o.leg_modulus);
  m.read("spring_damping", o.spring_damping);
  m.read("wall_factor", o.wall_factor);
  m.read("proxy_factor", o.proxy_factor);
  m.read("anchor_factor", o.anchor_factor);
  m.read("n_proxy", o.n_proxy);
  m.read("coupler_radius", o.coupler_radius);
  m.read("selection_margin", o.selection_margin);
  m.read("pin_factor", o.pin_factor);
  m.read("side_a_share", o.side_a_share);
  m.read("ground_clearance", o.ground_clearance);
  m.read("min_leg_masses", o.min_leg_masses);
  m.finish();
}

void read_sim(MapReader m, SimSettings& s) {
  m.read("dt", s.dt);
  m.read("gravity", s.gravity);
  m.read("drag", s.drag);
  m.read("workers", s.workers);
  MapReader c = m.child("contact");
  c.read("enabled", s.contact.enabled);
  c.read("ground_height", s.contact.ground_height);
  c.read("normal_stiffness", s.contact.normal_stiffness);
  c.read("normal_damping", s.contact.normal_damping);
  c.read("friction", s.contact.friction_coefficient);
  c.finish();
  m.finish();
}

void read_gait(MapReader m, GaitSettings& g) {
  std::string preset;
  m.read("preset", preset);
  if (!preset.empty()) {
    try {
      g.preset = parse_gait_preset(preset);
    } catch (const GaitError& e) {
      throw ConfigError("gait.preset", 0, e.what());
    }
  }
  m.read_scaled("theta_low_deg", g.overrides.theta_low, kDeg);
  m.read_scaled("theta_high_deg", g.overrides.theta_high, kDeg);
  m.read("stance_ratio", g.overrides.stance_ratio);
  m.read("period", g.overrides.period);
  m.read("phase_offset", g.overrides.phase_offset);
  m.read("direction_sign", g.overrides.direction_sign);
  m.read("control_dt", g.control_dt);
  m.read("joint_update_divisor", g.joint_update_divisor);
  m.read("settle_time", g.settle_time);
  m.finish();
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, 0, message);
}

}  // namespace

ConfigError::ConfigError(const std::string& field, int line, const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "config";
        if (line > 0) os << " line " << line;
        if (!field.empty()) os << ", field '" << field << "'";
        os << ": " << message;
        return os.str();
      }()),
      field_(field),
      line_(line) {}

GaitParams GaitSettings::resolve() const {
  GaitParams g = gait_preset(preset);
  if (overrides.theta_low) g.theta_low = *overrides.theta_low;
  if (overrides.theta_high) g.theta_high = *overrides.theta_high;
  if (overrides.stance_ratio) g.stance_ratio = *overrides.stance_ratio;
  if (overrides.period) g.period = *overrides.period;
  if (overrides.phase_offset) g.phase_offset = *overrides.phase_offset;
  if (overrides.direction_sign) g.direction_sign = *overrides.direction_sign;
  return g;
}

void ScenarioConfig::validate() const {
  try {
    robot.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("robot", 0, e.what());
  }
  try {
    gait.resolve().validate();
    gains.validate();
  } catch (const GaitError& e) {
    throw ConfigError("gait", 0, e.what());
  }
  require(sim.dt > 0.0 && std::isfinite(sim.dt), "sim.dt", "must be positive");
  require(is_finite(sim.gravity), "sim.gravity", "must be finite");
  require(sim.drag >= 0.0, "sim.drag", "must be non-negative");
  require(sim.workers >= 0, "sim.workers", "must be non-negative");
  require(sim.contact.normal_stiffness >= 0.0, "sim.contact.normal_stiffness", "must be non-negative");
  require(sim.contact.normal_damping >= 0.0, "sim.contact.normal_damping", "must be non-negative");
  require(sim.contact.friction_coefficient >= 0.0, "sim.contact.friction", "must be non-negative");
  require(sampling.radius > 0.0, "sampling.radius", "must be positive");
  require(lattice.connect_factor > 1.0, "lattice.connect_factor", "must exceed 1 so neighbours connect");
  require(lattice.body_modulus > 0.0 && lattice.leg_modulus > 0.0, "lattice.body_modulus",
          "moduli must be positive");
  require(lattice.n_proxy >= 1, "lattice.n_proxy", "must be at least 1");
  require(lattice.side_a_share >= 0.0 && lattice.side_a_share <= 1.0, "lattice.side_a_share", "must lie in [0, 1]");
  require(gait.control_dt > 0.0, "gait.control_dt", "must be positive");
  const double ratio = gait.control_dt / sim.dt;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio && std::round(ratio) >= 1.0, "gait.control_dt",
          "must be an integer multiple of sim.dt");
  require(gait.joint_update_divisor >= 1, "gait.joint_update_divisor", "must be at least 1");
  require(gait.settle_time >= 0.0, "gait.settle_time", "must be non-negative");
  require(motor.current_to_rate > 0.0 && motor.max_rate > 0.0, "motor", "gain and rate limit must be positive");
  require(run.duration > 0.0, "run.duration", "must be positive");
  require(run.stop_distance >= 0.0, "run.stop_distance", "must be non-negative");
  require(run.fall_tilt > 0.0 && run.fall_tilt <= std::numbers::pi, "run.fall_tilt_deg", "must lie in (0, 180]");
  const double per_tick = run.trajectory_interval / gait.control_dt;
  require(run.trajectory_interval > 0.0 && std::abs(per_tick - std::round(per_tick)) <= 1e-9 * per_tick &&
              std::round(per_tick) >= 1.0,
          "output.trajectory_interval", "must be a positive multiple of gait.control_dt");
  for (double a : sweep.alphas)
    require(a >= 0.0 && a <= std::numbers::pi / 3.0, "sweep.alphas_deg", "every alpha must lie in [0, 60] degrees");
  require(sweep.period > 0.0, "sweep.period", "must be positive");
  require(legs.solid_tip_diameter > 0.0, "legs.solid_tip_diameter", "must be positive");
  require(bench.steps >= 1, "bench.steps", "must be at least 1");
}

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
  }

  ScenarioConfig c;
  std::map<std::string, int> lines;
  try {
    MapReader top(root, "", lines);
    read_robot(top.child("robot"), c.robot);
    read_lattice(top.child("lattice"), c.lattice);
    read_sim(top.child("sim"), c.sim);
    c.lattice.ground_height = c.sim.contact.ground_height;

    MapReader sampling = top.child("sampling");
    sampling.read("radius", c.sampling.radius);
    sampling.read("seed", c.sampling.seed);
    sampling.finish();

    read_gait(top.child("gait"), c.gait);

    MapReader gains = top.child("gains");
    gains.read("kp_pos", c.gains.kp_pos);
    gains.read("kp_vel", c.gains.kp_vel);
    gains.read("ki_vel", c.gains.ki_vel);
    gains.read("output_limit", c.gains.output_limit);
    gains.read("integrator_limit", c.gains.integrator_limit);
    gains.finish();

    MapReader motor = top.child("motor");
    motor.read("current_to_rate", c.motor.current_to_rate);
    motor.read_scaled("max_rate_rpm", c.motor.max_rate, kRpm);
    motor.finish();

    MapReader run = top.child("run");
    run.read("duration", c.run.duration);
    run.read("stop_distance", c.run.stop_distance);
    run.read_scaled("fall_tilt_deg", c.run.fall_tilt, kDeg);
    run.finish();

    MapReader output = top.child("output");
    output.read("trajectory_interval", c.run.trajectory_interval);
    output.finish();

    MapReader sweep = top.child("sweep");
    std::vector<double> alphas_deg;
    sweep.read("alphas_deg", alphas_deg);
    for (double a : alphas_deg) c.sweep.alphas.push_back(a * kDeg);
    sweep.read("period", c.sweep.period);
    sweep.finish();

    MapReader legs = top.child("legs");
    legs.read("solid_tip_diameter", c.legs.solid_tip_diameter);
    legs.read("tip_load", c.legs.tip_load);
    legs.finish();

    MapReader bench = top.child("bench");
    bench.read("steps", c.bench.steps);
    bench.finish();

    top.finish();
    c.validate();
  } catch (const ConfigError& e) {
    if (e.line() > 0 || e.field().empty()) throw;
    // Point validation errors at the offending line when the field came from the file.
    auto it = lines.lower_bound(e.field());
    if (it != lines.end() && it->first.compare(0, e.field().size(), e.field()) == 0) {
      const std::string message = std::string(e.what()).substr(std::string(e.what()).find(": ") + 2);
      throw ConfigError(e.field(), it->second, message);
    }
    throw;
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  using nlohmann::ordered_json;
  auto vec = [](const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); };
  const GaitParams g = c.gait.resolve();
  ordered_json j;
  j["robot"] = {{"body_length", c.robot.body_length},
                {"body_width", c.robot.body_width},
                {"body_height", c.robot.body_height},
                {"body_wall", c.robot.body_wall},
                {"total_mass", c.robot.total_mass},
                {"leg_step_length", c.robot.leg_step_length},
                {"leg_length", c.robot.leg_length},
                {"leg_tip_diameter", c.robot.leg_tip_diameter},
                {"leg_shoulder_diameter", c.robot.leg_shoulder_diameter},
                {"leg_inner_tip_diameter", c.robot.leg_inner_tip_diameter},
                {"leg_inner_shoulder_diameter", c.robot.leg_inner_shoulder_diameter},
                {"leg_hollow", c.robot.leg_hollow},
                {"leg_mass", c.robot.leg_mass},
                {"leg_angle_deg", c.robot.leg_angle_alpha / kDeg},
                {"leg_tilt", to_string(c.robot.leg_tilt)},
                {"motor_mass", c.robot.motor_mass},
                {"coupler_mass", c.robot.coupler_mass},
                {"leg_x_offset", c.robot.leg_x_offset},
                {"joint_height", c.robot.joint_height},
                {"leg_gap", c.robot.leg_gap},
                {"motor_inset", c.robot.motor_inset}};
  j["lattice"] = {{"connect_factor", c.lattice.connect_factor},
                  {"body_modulus", c.lattice.body_modulus},
                  {"leg_modulus", c.lattice.leg_modulus},
                  {"spring_damping", c.lattice.spring_damping},
                  {"wall_factor", c.lattice.wall_factor},
                  {"proxy_factor", c.lattice.proxy_factor},
                  {"anchor_factor", c.lattice.anchor_factor},
                  {"n_proxy", c.lattice.n_proxy},
                  {"coupler_radius", c.lattice.coupler_radius},
                  {"selection_margin", c.lattice.selection_margin},
                  {"pin_factor", c.lattice.pin_factor},
                  {"side_a_share", c.lattice.side_a_share},
                  {"ground_clearance", c.lattice.ground_clearance},
                  {"min_leg_masses", c.lattice.min_leg_masses}};
  j["sim"] = {{"dt", c.sim.dt},
              {"gravity", vec(c.sim.gravity)},
              {"drag", c.sim.drag},
              {"workers", c.sim.workers},
              {"contact",
               {{"enabled", c.sim.contact.enabled},
                {"ground_height", c.sim.contact.ground_height},
                {"normal_stiffness", c.sim.contact.normal_stiffness},
                {"normal_damping", c.sim.contact.normal_damping},
                {"friction", c.sim.contact.friction_coefficient}}}};
  j["sampling"] = {{"radius", c.sampling.radius}, {"seed", c.sampling.seed}};
  j["gait"] = {{"preset", std::string(to_string(c.gait.preset))},
               {"theta_low_deg", g.theta_low / kDeg},
               {"theta_high_deg", g.theta_high / kDeg},
               {"stance_ratio", g.stance_ratio},
               {"period", g.period},
               {"phase_offset", g.phase_offset},
               {"direction_sign", g.direction_sign},
               {"control_dt", c.gait.control_dt},
               {"joint_update_divisor", c.gait.joint_update_divisor},
               {"settle_time", c.gait.settle_time}};
  j["gains"] = {{"kp_pos", c.gains.kp_pos},
                {"kp_vel", c.gains.kp_vel},
                {"ki_vel", c.gains.ki_vel},
                {"output_limit", c.gains.output_limit},
                {"integrator_limit", c.gains.integrator_limit}};
  j["motor"] = {{"current_to_rate", c.motor.current_to_rate}, {"max_rate_rpm", c.motor.max_rate / kRpm}};
  j["run"] = {{"duration", c.run.duration},
              {"stop_distance", c.run.stop_distance},
              {"fall_tilt_deg", c.run.fall_tilt / kDeg}};
  j["output"] = {{"trajectory_interval", c.run.trajectory_interval}};
  ordered_json alphas = ordered_json::array();
  for (double a : c.sweep.alphas) alphas.push_back(a / kDeg);
  j["sweep"] = {{"alphas_deg", alphas}, {"period", c.sweep.period}};
  j["legs"] = {{"solid_tip_diameter", c.legs.solid_tip_diameter}, {"tip_load", c.legs.tip_load}};
  j["bench"] = {{"steps", c.bench.steps}};
  return j.dump(2);
}

}  // namespace flexisim
