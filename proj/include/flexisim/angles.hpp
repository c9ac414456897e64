#pragma once

#include <numbers>

namespace flexisim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

//! Maps an angle to [0, 2pi).
double wrap_two_pi(double angle);
//! Maps an angle to (-pi, pi].
double wrap_to_pi(double angle);

}  // namespace flexisim
