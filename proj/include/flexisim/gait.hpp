#pragma once

#include "flexisim/angles.hpp"
#include "flexisim/joint.hpp"
#include "flexisim/spring_core.hpp"

#include <array>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flexisim {

//! Leg slots, in the order every per-leg array uses.
enum class Leg { FrontLeft = 0, FrontRight = 1, BackLeft = 2, BackRight = 3 };
inline constexpr std::array<const char*, 4> kLegLabels = {"FL", "FR", "BL", "BR"};

//! Motor speed limit: 469 rpm.
inline constexpr double kMotorMaxRate = 469.0 * kTwoPi / 60.0;

class GaitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

//! Two-phase constant-velocity leg template. The stance phase sweeps the
//! contact angle theta_high - theta_low over the first stance_ratio of the
//! cycle; the swing phase covers the remaining 2pi - c.
struct GaitParams {
  double theta_low = -std::numbers::pi / 6.0;  //!< rad, stance start
  double theta_high = std::numbers::pi / 6.0;  //!< rad, stance end
  double stance_ratio = 0.5;                    //!< in (0, 1)
  double period = 0.5;                          //!< s
  std::array<double, 4> phase_offset{0.0, 0.0, 0.5, 0.5};
  std::array<double, 4> direction_sign{1.0, -1.0, 1.0, -1.0};

  double contact_angle() const { return theta_high - theta_low; }
  //! Normalized stance speed c / s (rad per unit normalized time).
  double stance_speed() const { return contact_angle() / stance_ratio; }
  //! Normalized swing speed (2pi - c) / (1 - s).
  double swing_speed() const { return (kTwoPi - contact_angle()) / (1.0 - stance_ratio); }

  //! Throws GaitError when the template is not well formed.
  void validate() const;
};

struct LegPhase {
  double t_c = 0.0;       //!< normalized time in [0, 1)
  double t_c_prev = 0.0;  //!< value before the last advance
};

//! t_c <- (t_c + dt / period) mod 1.
LegPhase advance_phase(const LegPhase& phase, double dt, const GaitParams& params);

//! Desired leg angle in [0, 2pi) at normalized time phase.t_c. The stance
//! branch is taken while t_c < stance_ratio.
double gait_target(const LegPhase& phase, const GaitParams& params);

//! gait_target with the leg's direction sign applied, in [0, 2pi).
double leg_target(const LegPhase& phase, const GaitParams& params, Leg leg);

struct ControllerGains {
  double kp_pos = 40.0;  //!< (rad/s) per rad
  double kp_vel = 0.5;   //!< current per (rad/s)
  double ki_vel = 5.0;   //!< current per rad
  double output_limit = 100.0;
  double integrator_limit = 20.0;

  void validate() const;
};

struct CascadeOutput {
  double current = 0.0;
  double integrator = 0.0;
};

//! Position P loop feeding a velocity PI loop. The angle error is wrapped
//! to the shortest path before the P stage.
CascadeOutput cascade_control(double theta_des, double theta_meas, double omega_meas,
                              const ControllerGains& gains, double integrator, double dt);

//! First-order stand-in for the motor driver: commanded current to joint rate.
struct MotorMap {
  double current_to_rate = 1.0;  //!< (rad/s) per unit current
  double max_rate = kMotorMaxRate;

  double rate(double current) const;
};

enum class GaitPreset { Pace, Bounding, TurnLeft, TurnRight, Backflip };

GaitPreset parse_gait_preset(std::string_view name);
std::string_view to_string(GaitPreset preset);

//! Phase arrangement and default template for a named gait. Numeric values
//! are simulator defaults, not measured robot parameters.
GaitParams gait_preset(GaitPreset preset);
inline GaitParams gait_preset(std::string_view name) { return gait_preset(parse_gait_preset(name)); }

struct LegControlState {
  LegPhase phase;
  double integrator = 0.0;
  double commanded_rate = 0.0;  //!< rad/s, last motor output
  double pending_angle = 0.0;   //!< rotation accumulated between joint updates
};

//! Per-robot controller: one gait template, four legs.
struct GaitController {
  GaitParams gait;
  ControllerGains gains;
  MotorMap motor;
  std::array<LegControlState, 4> legs;
  double control_dt = 1.0e-3;      //!< s
  int joint_update_divisor = 20;   //!< rotate joints every n-th physics step
  bool hold_phase = false;         //!< freeze the gait clock (posture hold)

  //! Sets every leg's phase to its offset.
  void reset_phases();
};

//! Advances the coupled system by one control tick: per leg, target ->
//! cascade -> motor rate, then control_dt / physics_dt physics substeps with
//! the commanded rotation spread across them. physics_dt is state.dt.
void drive_joints(SimState& state, Stepper& stepper, std::span<RevoluteJoint> joints,
                  GaitController& controller);

}  // namespace flexisim
