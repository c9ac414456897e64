#include "flexisim/joint.hpp"

#include "flexisim/angles.hpp"
#include "flexisim/random.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace flexisim {

std::vector<std::uint32_t> select_joint_vertices(const SimState& state, const PartRange& part,
                                                 const Segment& axis, double selection_radius) {
  const Vec3 along = axis.end - axis.start;
  const double length = norm(along);
  if (!(length > 0.0)) throw JointError("joint axis segment has zero length");
  const Vec3 u = along / length;

  std::vector<std::uint32_t> selected;
  for (std::uint32_t i = part.first; i < part.first + part.count; ++i) {
    const Vec3 rel = state.masses[i].position - axis.start;
    const double t = dot(rel, u);
    if (t < 0.0 || t > length) continue;
    if (norm(rel - u * t) <= selection_radius) selected.push_back(i);
  }
  return selected;
}

RevoluteJoint create_joint(SimState& state, const PartRange& part_a, const PartRange& part_b,
                           const Segment& axis, const JointOptions& options, std::uint64_t seed) {
  if (options.n_proxy < 1) throw JointError("a joint needs at least one proxy spring");
  if (options.side_a_share < 0.0 || options.side_a_share > 1.0)
    throw JointError("side_a_share must lie in [0, 1]");

  RevoluteJoint joint;
  joint.side_a_share = options.side_a_share;
  joint.side_a_vertices = select_joint_vertices(state, part_a, axis, options.selection_radius);
  joint.side_b_vertices = select_joint_vertices(state, part_b, axis, options.selection_radius);

  auto require = [](const PartRange& part, std::size_t n) {
    if (n < 3) {
      std::ostringstream os;
      os << "joint selection volume holds " << n << " vertices of part '" << part.name
         << "' (need at least 3)";
      throw JointError(os.str());
    }
  };
  require(part_a, joint.side_a_vertices.size());
  require(part_b, joint.side_b_vertices.size());

  joint.axis_anchor_a = state.add_mass(axis.start, options.anchor_mass_a);
  joint.axis_anchor_b = state.add_mass(axis.end, options.anchor_mass_b);

  for (const auto* side : {&joint.side_a_vertices, &joint.side_b_vertices}) {
    for (std::uint32_t v : *side) {
      joint.anchor_springs.push_back(
          state.add_spring(v, joint.axis_anchor_a, options.anchor_stiffness, options.anchor_damping));
      joint.anchor_springs.push_back(
          state.add_spring(v, joint.axis_anchor_b, options.anchor_stiffness, options.anchor_damping));
    }
  }

  // Distinct cross pairs while they last; repeats only once every pair is used.
  Rng rng(seed);
  const std::uint64_t na = joint.side_a_vertices.size();
  const std::uint64_t nb = joint.side_b_vertices.size();
  const std::uint64_t total = na * nb;
  std::set<std::uint64_t> used;
  for (int k = 0; k < options.n_proxy; ++k) {
    std::uint64_t code = rng.below(total);
    if (used.size() < total) {
      while (used.count(code) != 0) code = rng.below(total);
      used.insert(code);
    }
    const std::uint32_t va = joint.side_a_vertices[code / nb];
    const std::uint32_t vb = joint.side_b_vertices[code % nb];
    joint.proxy_springs.push_back(state.add_spring(va, vb, options.proxy_stiffness, options.proxy_damping));
  }

  joint.latch_time = state.sim_time();
  return joint;
}

void rotate_joint(SimState& state, RevoluteJoint& joint, double delta_angle) {
  if (!(std::abs(delta_angle) <= kMaxJointDelta)) {
    std::ostringstream os;
    os << "joint rotation of " << delta_angle << " rad exceeds the per-call limit of " << kMaxJointDelta
       << " rad; subdivide the motion";
    throw JointError(os.str());
  }
  if (delta_angle == 0.0) return;

  const Vec3 pivot = state.masses[joint.axis_anchor_a].position;
  const Vec3 along = state.masses[joint.axis_anchor_b].position - pivot;
  const double length = norm(along);
  if (!(length > kDegenerateLength)) throw JointError("joint anchors have collapsed onto each other");
  const Vec3 u = along / length;

  auto turn = [&](const std::vector<std::uint32_t>& side, double angle) {
    if (angle == 0.0) return;
    const Mat3 r = Mat3::rotation(u, angle);
    for (std::uint32_t i : side) {
      MassPoint& p = state.masses[i];
      if (p.fixed) continue;
      p.position = pivot + r * (p.position - pivot);
      p.velocity = r * p.velocity;
    }
  };
  turn(joint.side_a_vertices, delta_angle * joint.side_a_share);
  turn(joint.side_b_vertices, -delta_angle * (1.0 - joint.side_a_share));

  joint.unwrapped_angle += delta_angle;
  joint.angle = wrap_two_pi(joint.unwrapped_angle);

  for (std::uint32_t s : joint.proxy_springs) {
    SpringElement& e = state.springs[s];
    e.rest_length = norm(state.masses[e.endpoint_b].position - state.masses[e.endpoint_a].position);
  }
}

JointReading joint_measured_state(const RevoluteJoint& joint, const SimState& state) {
  const double elapsed = state.sim_time() - joint.latch_time;
  JointReading r;
  r.angle = joint.unwrapped_angle;
  r.rate = elapsed > 0.0 ? (joint.unwrapped_angle - joint.latch_angle) / elapsed : joint.angle_rate;
  return r;
}

void latch_encoder(RevoluteJoint& joint, const SimState& state) {
  joint.angle_rate = joint_measured_state(joint, state).rate;
  joint.latch_time = state.sim_time();
  joint.latch_angle = joint.unwrapped_angle;
}

double axial_angular_momentum(const SimState& state, const Vec3& point, const Vec3& axis) {
  double l = 0.0;
  for (const MassPoint& m : state.masses) l += m.mass * dot(axis, cross(m.position - point, m.velocity));
  return l;
}

}  // namespace flexisim
