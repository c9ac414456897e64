#include "flexisim/robot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flexisim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("robot spec: ") + what);
}

Vec3 mirror_y(const Vec3& p) { return {p.x, -p.y, p.z}; }

bool is_left(Leg leg) { return leg == Leg::FrontLeft || leg == Leg::BackLeft; }
bool is_front(Leg leg) { return leg == Leg::FrontLeft || leg == Leg::FrontRight; }

struct LegLayout {
  Vec3 axis;        // outward
  Vec3 down;        // leg direction at joint angle 0
  Vec3 root;        // centre of the shoulder face
  Vec3 outer;       // outer anchor (coupler)
  Vec3 inner;       // inner anchor (motor)
};

// Left-side layout; the right side is its mirror image in y.
LegLayout left_layout(const RobotSpec& spec, double x) {
  const double ca = std::cos(spec.leg_angle_alpha);
  const double sa = std::sin(spec.leg_angle_alpha);
  const double shoulder = 0.5 * spec.leg_shoulder_diameter;
  LegLayout l;
  switch (spec.leg_tilt) {
    case LegTilt::Radial: {
      const double fore = x < 0.0 ? -1.0 : 1.0;
      l.axis = {fore * sa, ca, 0.0};
      l.down = {0.0, 0.0, -1.0};
      break;
    }
    case LegTilt::FeetOutward:
      l.axis = {0.0, ca, sa};
      l.down = {0.0, sa, -ca};
      break;
    case LegTilt::FeetInward:
      l.axis = {0.0, ca, -sa};
      l.down = {0.0, -sa, -ca};
      break;
  }
  const Vec3 pivot{x, 0.5 * spec.body_width, spec.joint_height};
  l.root = pivot + l.axis * (spec.leg_gap + shoulder);
  l.outer = l.root + l.axis * shoulder;
  l.inner = pivot - l.axis * spec.motor_inset;
  return l;
}

Pose leg_pose(const LegLayout& l) {
  return Pose{Mat3::from_columns(l.axis, cross(l.down, l.axis), l.down), l.root};
}

void add_springs(SimState& state, const ConnectResult& connect, std::uint32_t offset) {
  for (SpringElement s : connect.springs) {
    s.endpoint_a += offset;
    s.endpoint_b += offset;
    state.springs.push_back(s);
  }
}

}  // namespace

void RobotSpec::validate() const {
  require(body_length > 0.0 && body_width > 0.0 && body_height > 0.0 && body_wall > 0.0,
          "body dimensions must be positive");
  require(leg_length > 0.0 && leg_tip_diameter > 0.0 && leg_shoulder_diameter > 0.0,
          "leg dimensions must be positive");
  if (leg_hollow) {
    require(leg_inner_tip_diameter > 0.0 && leg_inner_shoulder_diameter > 0.0,
            "hollow leg inner diameters must be positive");
    require(leg_inner_tip_diameter < leg_tip_diameter && leg_inner_shoulder_diameter < leg_shoulder_diameter,
            "hollow leg inner diameters must be below the outer diameters");
  }
  require(leg_angle_alpha >= 0.0 && leg_angle_alpha <= 0.5 * std::numbers::pi, "leg angle must lie in [0, pi/2]");
  require(leg_mass > 0.0 && motor_mass > 0.0 && coupler_mass > 0.0, "part masses must be positive");
  require(body_shell_mass() > 0.0, "total mass must exceed legs, motors and couplers");
  require(leg_x_offset >= 0.0 && leg_x_offset < 0.5 * body_length, "leg_x_offset must lie inside the body");
  require(motor_inset > 0.0 && motor_inset < 0.5 * body_width, "motor inset must lie inside the body");
}

std::string_view to_string(LegTilt tilt) {
  switch (tilt) {
    case LegTilt::Radial: return "radial";
    case LegTilt::FeetOutward: return "outward";
    case LegTilt::FeetInward: return "inward";
  }
  return "unknown";
}

SolidShape leg_shape(const RobotSpec& spec) {
  if (spec.leg_hollow)
    return SolidShape(HollowFrustum{0.5 * spec.leg_shoulder_diameter, 0.5 * spec.leg_tip_diameter,
                                    0.5 * spec.leg_inner_shoulder_diameter, 0.5 * spec.leg_inner_tip_diameter,
                                    spec.leg_length});
  return SolidShape(Frustum{0.5 * spec.leg_shoulder_diameter, 0.5 * spec.leg_tip_diameter, spec.leg_length});
}

Vec3 joint_axis_direction(const RobotSpec& spec, Leg leg) {
  const Vec3 a = left_layout(spec, is_front(leg) ? spec.leg_x_offset : -spec.leg_x_offset).axis;
  return is_left(leg) ? a : mirror_y(a);
}

Robot build_robot(const RobotSpec& spec, const BuildOptions& options, double sample_radius, std::uint64_t seed) {
  spec.validate();
  if (!(sample_radius > 0.0)) throw std::invalid_argument("sample radius must be positive");

  Robot robot;
  robot.body_length = spec.body_length;
  robot.sample_radius = sample_radius;
  SimState& state = robot.state;
  state.contact.ground_height = options.ground_height;

  const double r = sample_radius;
  const double connect_radius = options.connect_factor * r;
  const double body_k = options.body_modulus * r;
  const double leg_k = options.leg_modulus * r;

  // Body.
  const double wall = std::max(spec.body_wall, options.wall_factor * r);
  const SolidShape body_solid(BoxShell{{spec.body_length, spec.body_width, spec.body_height}, wall});
  const SampledPart body = poisson_sample(body_solid, r, seed, spec.body_shell_mass());
  robot.body = PartRange{"body", 0, static_cast<std::uint32_t>(body.points.size())};
  for (const Vec3& p : body.points) state.add_mass(p, body.point_mass());
  add_springs(state, connect_springs(body, connect_radius, body_k, options.spring_damping), 0);

  // Legs: one sample in the leg frame, placed four times. The right legs
  // are exact mirror images of the left ones.
  SolidShape leg_solid = leg_shape(spec);
  const SampledPart leg = poisson_sample(leg_solid, r, seed + 1, spec.leg_mass);
  if (static_cast<int>(leg.points.size()) < options.min_leg_masses) {
    std::ostringstream os;
    os << "leg sampled to " << leg.points.size() << " masses (need at least " << options.min_leg_masses
       << "); reduce the sample radius";
    throw BuildError(os.str());
  }
  const ConnectResult leg_springs = connect_springs(leg, connect_radius, leg_k, options.spring_damping);

  std::array<LegLayout, 4> layouts;
  for (std::size_t i = 0; i < 4; ++i) {
    const Leg id = static_cast<Leg>(i);
    const double x = is_front(id) ? spec.leg_x_offset : -spec.leg_x_offset;
    LegLayout l = left_layout(spec, x);
    const Pose pose = leg_pose(l);
    if (!is_left(id)) l = LegLayout{mirror_y(l.axis), mirror_y(l.down), mirror_y(l.root), mirror_y(l.outer),
                                    mirror_y(l.inner)};
    layouts[i] = l;

    const auto first = static_cast<std::uint32_t>(state.masses.size());
    robot.legs[i] = PartRange{std::string("leg ") + kLegLabels[i], first,
                              static_cast<std::uint32_t>(leg.points.size())};
    for (const Vec3& local : leg.points) {
      const Vec3 w = pose.to_world(local);
      state.add_mass(is_left(id) ? w : mirror_y(w), leg.point_mass());
    }
    add_springs(state, leg_springs, first);
  }

  // Joints. The axis runs from the coupler (outside) to the motor (inside),
  // so a positive joint angle turns the leg positively about its outward axis.
  JointOptions jo;
  jo.selection_radius = options.coupler_radius + options.selection_margin * r;
  jo.n_proxy = options.n_proxy;
  jo.anchor_stiffness = options.anchor_factor * std::max(body_k, leg_k);
  jo.anchor_damping = options.spring_damping;
  jo.proxy_stiffness = options.proxy_factor * std::max(body_k, leg_k);
  jo.proxy_damping = options.spring_damping;
  jo.anchor_mass_a = spec.coupler_mass;
  jo.anchor_mass_b = spec.motor_mass;
  jo.side_a_share = options.side_a_share;
  for (std::size_t i = 0; i < 4; ++i) {
    const Segment axis{layouts[i].outer, layouts[i].inner};
    robot.joints[i] = create_joint(state, robot.body, robot.legs[i], axis, jo, seed + 100 + i);
    robot.motors[i] = robot.joints[i].axis_anchor_b;
  }

  // Pin each motor into the surrounding body lattice.
  const double pin_radius = options.pin_factor * r;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::uint32_t motor = robot.motors[i];
    const auto& selected = robot.joints[i].side_a_vertices;
    for (std::uint32_t v = robot.body.first; v < robot.body.first + robot.body.count; ++v) {
      if (std::binary_search(selected.begin(), selected.end(), v)) continue;
      if (norm(state.masses[v].position - state.masses[motor].position) <= pin_radius)
        state.add_spring(v, motor, jo.anchor_stiffness, options.spring_damping);
    }
  }

  double lowest = INFINITY;
  for (const MassPoint& m : state.masses) lowest = std::min(lowest, m.position.z);
  const double lift = options.ground_height + options.ground_clearance - lowest;
  for (MassPoint& m : state.masses) m.position.z += lift;

  validate(state);
  return robot;
}

BodyFrame body_frame(const Robot& robot) {
  const auto& m = robot.state.masses;
  const Vec3 fl = m[robot.motors[0]].position, fr = m[robot.motors[1]].position;
  const Vec3 bl = m[robot.motors[2]].position, br = m[robot.motors[3]].position;
  BodyFrame f;
  f.forward = normalized((fl + fr) - (bl + br));
  const Vec3 lateral = (fl + bl) - (fr + br);
  f.left = normalized(lateral - f.forward * dot(f.forward, lateral));
  f.up = cross(f.forward, f.left);
  return f;
}

double leg_tip_deflection(const RobotSpec& spec, const BuildOptions& options, double sample_radius,
                          std::uint64_t seed, double load) {
  spec.validate();
  const double r = sample_radius;
  const SampledPart leg = poisson_sample(leg_shape(spec), r, seed + 1, spec.leg_mass);
  const ConnectResult springs =
      connect_springs(leg, options.connect_factor * r, options.leg_modulus * r, options.spring_damping);

  SimState state;
  state.gravity = Vec3{};
  state.contact.enabled = false;
  state.drag = 40.0;
  const double clamp_depth = options.coupler_radius + options.selection_margin * r;
  std::vector<std::uint32_t> tip;
  for (std::size_t i = 0; i < leg.points.size(); ++i) {
    const Vec3& p = leg.points[i];
    state.add_mass(p, leg.point_mass(), p.z <= clamp_depth);
    if (p.z >= spec.leg_length - r) tip.push_back(static_cast<std::uint32_t>(i));
  }
  add_springs(state, springs, 0);
  if (tip.empty()) throw BuildError("leg has no tip masses to load");
  for (std::uint32_t i : tip) state.masses[i].external_force = {load / static_cast<double>(tip.size()), 0.0, 0.0};

  Stepper stepper(1);
  const auto steps = static_cast<std::int64_t>(std::llround(0.5 / state.dt));
  for (std::int64_t s = 0; s < steps; ++s) stepper.step(state);

  double deflection = 0.0;
  for (std::uint32_t i : tip) deflection += state.masses[i].position.x - leg.points[i].x;
  return deflection / static_cast<double>(tip.size());
}

}  // namespace flexisim
