#include "flexisim/gait.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flexisim {

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double wrap_to_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w > std::numbers::pi)
    w -= kTwoPi;
  else if (w <= -std::numbers::pi)
    w += kTwoPi;
  return w;
}

void GaitParams::validate() const {
  const double c = contact_angle();
  if (!(c > 0.0 && c < kTwoPi)) throw GaitError("contact angle theta_high - theta_low must lie in (0, 2pi)");
  if (!(stance_ratio > 0.0 && stance_ratio < 1.0)) throw GaitError("stance ratio must lie in (0, 1)");
  if (!(period > 0.0) || !std::isfinite(period)) throw GaitError("cycle period must be positive");
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(phase_offset[i] >= 0.0 && phase_offset[i] < 1.0))
      throw GaitError(std::string("phase offset of leg ") + kLegLabels[i] + " must lie in [0, 1)");
    if (direction_sign[i] != 1.0 && direction_sign[i] != -1.0)
      throw GaitError(std::string("direction sign of leg ") + kLegLabels[i] + " must be +1 or -1");
  }
}

LegPhase advance_phase(const LegPhase& phase, double dt, const GaitParams& params) {
  LegPhase next;
  next.t_c_prev = phase.t_c;
  double t = phase.t_c + dt / params.period;
  t -= std::floor(t);
  next.t_c = t < 1.0 ? t : 0.0;
  return next;
}

double gait_target(const LegPhase& phase, const GaitParams& params) {
  const double t = phase.t_c;
  const double s = params.stance_ratio;
  if (t < s) return wrap_two_pi(params.theta_low + params.stance_speed() * t);
  return wrap_two_pi(params.theta_high + params.swing_speed() * (t - s));
}

double leg_target(const LegPhase& phase, const GaitParams& params, Leg leg) {
  return wrap_two_pi(params.direction_sign[static_cast<std::size_t>(leg)] * gait_target(phase, params));
}

void ControllerGains::validate() const {
  if (kp_pos < 0.0 || kp_vel < 0.0 || ki_vel < 0.0) throw GaitError("controller gains must be non-negative");
  if (!(output_limit > 0.0) || !(integrator_limit > 0.0)) throw GaitError("controller limits must be positive");
}

CascadeOutput cascade_control(double theta_des, double theta_meas, double omega_meas,
                              const ControllerGains& gains, double integrator, double dt) {
  const double e_theta = wrap_to_pi(theta_des - theta_meas);
  const double d = gains.kp_pos * e_theta;
  const double e_omega = d - omega_meas;
  CascadeOutput out;
  out.integrator = std::clamp(integrator + e_omega * dt, -gains.integrator_limit, gains.integrator_limit);
  out.current = std::clamp(gains.kp_vel * e_omega + gains.ki_vel * out.integrator, -gains.output_limit,
                           gains.output_limit);
  return out;
}

double MotorMap::rate(double current) const {
  return std::clamp(current_to_rate * current, -max_rate, max_rate);
}

GaitPreset parse_gait_preset(std::string_view name) {
  if (name == "pace") return GaitPreset::Pace;
  if (name == "bounding") return GaitPreset::Bounding;
  if (name == "turn_left") return GaitPreset::TurnLeft;
  if (name == "turn_right") return GaitPreset::TurnRight;
  if (name == "backflip") return GaitPreset::Backflip;
  throw GaitError("unknown gait preset '" + std::string(name) +
                  "' (expected pace, bounding, turn_left, turn_right or backflip)");
}

std::string_view to_string(GaitPreset preset) {
  switch (preset) {
    case GaitPreset::Pace: return "pace";
    case GaitPreset::Bounding: return "bounding";
    case GaitPreset::TurnLeft: return "turn_left";
    case GaitPreset::TurnRight: return "turn_right";
    case GaitPreset::Backflip: return "backflip";
  }
  return "unknown";
}

// Leg order everywhere is FL, FR, BL, BR. Joint angles are measured about
// each leg's outward axis, so forward walking needs opposite signs on the
// two sides while "same direction" in motor terms means equal signs.
GaitParams gait_preset(GaitPreset preset) {
  GaitParams g;
  switch (preset) {
    case GaitPreset::Pace:
      g.phase_offset = {0.0, 0.5, 0.0, 0.5};
      g.direction_sign = {1.0, -1.0, 1.0, -1.0};
      break;
    case GaitPreset::Bounding:
      g.phase_offset = {0.0, 0.0, 0.5, 0.5};
      g.direction_sign = {1.0, -1.0, 1.0, -1.0};
      break;
    case GaitPreset::TurnLeft:
      g.phase_offset = {0.0, 0.0, 0.0, 0.0};
      g.direction_sign = {-1.0, -1.0, -1.0, -1.0};
      break;
    case GaitPreset::TurnRight:
      g.phase_offset = {0.0, 0.0, 0.0, 0.0};
      g.direction_sign = {1.0, 1.0, 1.0, 1.0};
      break;
    case GaitPreset::Backflip:
      // Fast front/back sweep; the back pair trails by `phase_offset[2]`.
      g.theta_low = -std::numbers::pi / 3.0;
      g.theta_high = std::numbers::pi / 3.0;
      g.stance_ratio = 0.3;
      g.period = 0.3;
      g.phase_offset = {0.0, 0.0, 0.15, 0.15};
      g.direction_sign = {1.0, -1.0, 1.0, -1.0};
      break;
  }
  return g;
}

void GaitController::reset_phases() {
  for (std::size_t i = 0; i < legs.size(); ++i) {
    legs[i].phase.t_c = gait.phase_offset[i];
    legs[i].phase.t_c_prev = gait.phase_offset[i];
  }
}

void drive_joints(SimState& state, Stepper& stepper, std::span<RevoluteJoint> joints,
                  GaitController& controller) {
  if (joints.size() != controller.legs.size()) throw GaitError("drive_joints expects one joint per leg");
  const double ratio = controller.control_dt / state.dt;
  const auto substeps = static_cast<std::int64_t>(std::llround(ratio));
  if (substeps < 1 || std::abs(ratio - static_cast<double>(substeps)) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "control_dt " << controller.control_dt << " is not an integer multiple of physics dt " << state.dt;
    throw GaitError(os.str());
  }
  const int divisor = std::max(1, controller.joint_update_divisor);

  for (std::size_t i = 0; i < joints.size(); ++i) {
    LegControlState& leg = controller.legs[i];
    const double target = leg_target(leg.phase, controller.gait, static_cast<Leg>(i));
    const JointReading reading = joint_measured_state(joints[i], state);
    const CascadeOutput out = cascade_control(target, reading.angle, reading.rate, controller.gains,
                                              leg.integrator, controller.control_dt);
    leg.integrator = out.integrator;
    leg.commanded_rate = controller.motor.rate(out.current);
    latch_encoder(joints[i], state);
  }

  for (std::int64_t s = 0; s < substeps; ++s) {
    const bool update = (s + 1) % divisor == 0 || s + 1 == substeps;
    for (std::size_t i = 0; i < joints.size(); ++i) {
      LegControlState& leg = controller.legs[i];
      leg.pending_angle += leg.commanded_rate * state.dt;
      if (update) {
        rotate_joint(state, joints[i], leg.pending_angle);
        leg.pending_angle = 0.0;
      }
    }
    stepper.step(state);
  }

  if (!controller.hold_phase)
    for (LegControlState& leg : controller.legs)
      leg.phase = advance_phase(leg.phase, controller.control_dt, controller.gait);
}

}  // namespace flexisim
