#pragma once

#include "flexisim/spring_core.hpp"

// Serial scatter-style implementation of one physics step. It is the
// baseline the OpenMP gather kernels are checked against (bit-identical
// trajectories) and benchmarked against.
namespace flexisim::reference {

void step(SimState& state);

}  // namespace flexisim::reference
