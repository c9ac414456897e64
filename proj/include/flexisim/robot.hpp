#pragma once

#include "flexisim/gait.hpp"
#include "flexisim/geometry.hpp"
#include "flexisim/joint.hpp"
#include "flexisim/spring_core.hpp"

#include <array>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>

namespace flexisim {

//! Which way a leg's joint axis tilts away from lateral as alpha grows.
//! Radial keeps the axis horizontal and turns its outer end away from the
//! body centre (front axes forward, back axes backward), so each leg sweeps
//! a vertical plane turned by alpha from the median plane. FeetOutward
//! lifts the outer end of the axis so the feet splay out; FeetInward lowers
//! it so the legs lean in under the body.
enum class LegTilt { Radial, FeetOutward, FeetInward };

//! Parametric quadruped: a box body and four frustum legs, each leg a
//! single spoke rotating about a joint axis on the body side wall.
//! Lengths in m, masses in kg, angles in rad.
struct RobotSpec {
  double body_length = 0.360;
  double body_width = 0.214;
  double body_height = 0.090;
  double body_wall = 0.010;
  double total_mass = 3.21;

  double leg_step_length = 0.158;
  double leg_length = 0.158;  //!< joint axis to tip face
  double leg_tip_diameter = 0.048;
  double leg_shoulder_diameter = 0.064;
  double leg_inner_tip_diameter = 0.028;
  double leg_inner_shoulder_diameter = 0.040;
  bool leg_hollow = true;
  double leg_mass = 0.080;
  double leg_angle_alpha = 10.0 * std::numbers::pi / 180.0;
  LegTilt leg_tilt = LegTilt::Radial;

  double motor_mass = 0.386;
  double coupler_mass = 0.020;
  double leg_x_offset = 0.130;  //!< fore/aft distance of each joint from the body centre
  double joint_height = 0.0;    //!< joint axis height relative to the body centre
  double leg_gap = 0.005;       //!< clearance between body wall and leg
  double motor_inset = 0.030;   //!< motor depth inside the side wall, along the axis

  //! Throws std::invalid_argument on an inconsistent spec.
  void validate() const;
  double body_shell_mass() const { return total_mass - 4.0 * (leg_mass + motor_mass + coupler_mass); }
};

//! Lattice and joint parameters. Spring stiffness is derived from an
//! effective modulus times the sample radius so the continuum stiffness
//! stays roughly independent of resolution.
struct BuildOptions {
  double connect_factor = 1.8;    //!< connect radius / sample radius
  double body_modulus = 5.0e5;    //!< Pa
  double leg_modulus = 4.0e5;     //!< Pa
  double spring_damping = 0.5;    //!< N*s/m on structural springs
  double wall_factor = 2.0;       //!< body wall is at least this many sample radii
  double proxy_factor = 20.0;     //!< proxy stiffness / structural stiffness
  double anchor_factor = 5.0;     //!< anchor stiffness / structural stiffness
  int n_proxy = 64;
  double coupler_radius = 0.015;  //!< m
  double selection_margin = 2.5;  //!< selection radius = coupler_radius + margin * sample radius
  double pin_factor = 2.5;        //!< motor pin springs reach this many sample radii
  double side_a_share = 0.5;      //!< body share of each joint rotation
  double ground_clearance = 0.002;
  double ground_height = 0.0;
  int min_leg_masses = 30;
};

struct Robot {
  SimState state;
  std::array<RevoluteJoint, 4> joints;  //!< FL, FR, BL, BR
  PartRange body;
  std::array<PartRange, 4> legs;
  std::array<std::uint32_t, 4> motors{};  //!< inner anchors, also the body reference frame
  double body_length = 0.0;
  double sample_radius = 0.0;
};

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Samples the body and legs, wires springs and joints and drops the
//! result just above the ground. Deterministic for a given seed.
Robot build_robot(const RobotSpec& spec, const BuildOptions& options, double sample_radius, std::uint64_t seed);

std::string_view to_string(LegTilt tilt);

//! Leg geometry in its local frame (root face at z = 0, tip face at z = leg_length).
SolidShape leg_shape(const RobotSpec& spec);

//! Outward joint axis of one leg in the body frame (x forward, y left, z up).
Vec3 joint_axis_direction(const RobotSpec& spec, Leg leg);

//! Body-frame orientation derived from the four motor masses.
struct BodyFrame {
  Vec3 forward;  //!< unit, front minus back
  Vec3 left;     //!< unit, left minus right, orthogonalized
  Vec3 up;       //!< unit
};
BodyFrame body_frame(const Robot& robot);

//! Quasi-static lateral tip deflection of a single leg clamped at its root
//! under a total `load` (N) spread over the tip masses.
double leg_tip_deflection(const RobotSpec& spec, const BuildOptions& options, double sample_radius,
                          std::uint64_t seed, double load);

}  // namespace flexisim
