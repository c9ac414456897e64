#include "flexisim/reference.hpp"

#include <cmath>
#include <vector>

namespace flexisim::reference {

void step(SimState& state) {
  const std::size_t n = state.masses.size();
  std::vector<Vec3> force(n);

  for (std::size_t s = 0; s < state.springs.size(); ++s) {
    const SpringElement& e = state.springs[s];
    const MassPoint& a = state.masses[e.endpoint_a];
    const MassPoint& b = state.masses[e.endpoint_b];
    const Vec3 d = b.position - a.position;
    const double length = norm(d);
    if (length < kDegenerateLength) {
      if (e.rest_length > 0.0)
        throw SimulationError(SimulationError::Kind::DegenerateSpring, s, state.step_count,
                              "degenerate spring");
      continue;
    }
    const Vec3 axis = d / length;
    const double axial_rate = dot(b.velocity - a.velocity, axis);
    const Vec3 f = axis * (e.stiffness * (length - e.rest_length) + e.damping * axial_rate);
    force[e.endpoint_a] += f;
    force[e.endpoint_b] -= f;
  }

  for (std::size_t i = 0; i < n; ++i) {
    MassPoint& p = state.masses[i];
    Vec3 f = force[i];
    f += state.gravity * p.mass;
    f += contact_force(p, state.contact, state.dt);
    if (state.drag != 0.0) f -= p.velocity * (state.drag * p.mass);
    f += p.external_force;
    p.force_accum = f;
    if (!is_finite(f))
      throw SimulationError(SimulationError::Kind::NonFiniteState, i, state.step_count,
                            "non-finite force");
  }

  for (std::size_t i = 0; i < n; ++i) {
    MassPoint& p = state.masses[i];
    if (p.fixed) {
      p.velocity = Vec3{};
      continue;
    }
    p.velocity += (p.force_accum / p.mass) * state.dt;
    p.position += p.velocity * state.dt;
  }
  ++state.step_count;
}

}  // namespace flexisim::reference
