#pragma once

#include "flexisim/spring_core.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flexisim {

//! Per-call rotation cap (rad). Larger instantaneous rotations tear the lattice.
inline constexpr double kMaxJointDelta = 3.14159265358979323846 / 8.0;

//! Contiguous run of masses in a SimState belonging to one part.
struct PartRange {
  std::string name;
  std::uint32_t first = 0;
  std::uint32_t count = 0;
};

struct Segment {
  Vec3 start;
  Vec3 end;
};

struct JointOptions {
  double selection_radius = 0.04;  //!< m, radius of the selection cylinder about the axis
  int n_proxy = 16;
  double anchor_stiffness = 5.0e4;  //!< N/m
  double anchor_damping = 2.0;      //!< N*s/m
  double proxy_stiffness = 5.0e4;   //!< N/m, sets the effective joint friction
  double proxy_damping = 2.0;       //!< N*s/m
  double anchor_mass_a = 0.01;      //!< kg, mass placed at the segment start
  double anchor_mass_b = 0.01;      //!< kg, mass placed at the segment end
  //! Fraction of each commanded rotation applied to side A (the rest goes to
  //! side B in the opposite sense). 0.5 is the symmetric split.
  double side_a_share = 0.5;
};

class JointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Revolute coupling between two soft parts. The axis runs from
//! axis_anchor_a to axis_anchor_b through the current anchor positions. A
//! positive rotation turns side A positively and side B negatively about
//! that axis.
struct RevoluteJoint {
  std::uint32_t axis_anchor_a = 0;
  std::uint32_t axis_anchor_b = 0;
  std::vector<std::uint32_t> side_a_vertices;
  std::vector<std::uint32_t> side_b_vertices;
  std::vector<std::uint32_t> proxy_springs;
  std::vector<std::uint32_t> anchor_springs;
  double side_a_share = 0.5;

  double angle = 0.0;            //!< rad, in [0, 2pi)
  double unwrapped_angle = 0.0;  //!< rad, continuous
  double angle_rate = 0.0;       //!< rad/s, last measured

  // Encoder latch: where the angle was at the last measurement tick.
  double latch_time = 0.0;
  double latch_angle = 0.0;
};

//! Adds two anchor masses at the segment ends, selects the vertices of each
//! part inside the cylinder of `selection_radius` around the segment, ties
//! every selected vertex to both anchors and adds `n_proxy` seeded random
//! cross springs between the two selections.
RevoluteJoint create_joint(SimState& state, const PartRange& part_a, const PartRange& part_b,
                           const Segment& axis, const JointOptions& options, std::uint64_t seed);

//! Vertices of `part` inside the selection cylinder (not the anchors).
std::vector<std::uint32_t> select_joint_vertices(const SimState& state, const PartRange& part,
                                                 const Segment& axis, double selection_radius);

//! Rotates side A by +share*delta and side B by -(1-share)*delta about the
//! current anchor axis (positions and velocities), advances the joint angle
//! by delta, then resets every proxy spring to its current length.
void rotate_joint(SimState& state, RevoluteJoint& joint, double delta_angle);

struct JointReading {
  double angle = 0.0;  //!< rad, unwrapped
  double rate = 0.0;   //!< rad/s
};

//! Encoder: the kinematically commanded angle and the rate implied by the
//! interval since the last latch. Falls back to the last latched rate when
//! no simulated time has elapsed.
JointReading joint_measured_state(const RevoluteJoint& joint, const SimState& state);

//! Records the current reading as the start of the next measurement interval.
void latch_encoder(RevoluteJoint& joint, const SimState& state);

//! Total angular momentum about the line through `point` along unit `axis`.
double axial_angular_momentum(const SimState& state, const Vec3& point, const Vec3& axis);

}  // namespace flexisim
