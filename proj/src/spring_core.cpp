#include "flexisim/spring_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flexisim {

namespace {

constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

std::string describe(const char* what, std::size_t index, std::int64_t step) {
  std::ostringstream os;
  os << what << " " << index << " at step " << step;
  return os.str();
}

}  // namespace

int resolve_workers(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

std::uint32_t SimState::add_mass(const Vec3& position, double mass, bool fixed) {
  MassPoint p;
  p.position = position;
  p.mass = mass;
  p.fixed = fixed;
  masses.push_back(p);
  return static_cast<std::uint32_t>(masses.size() - 1);
}

std::uint32_t SimState::add_spring(std::uint32_t a, std::uint32_t b, double stiffness,
                                   double damping) {
  SpringElement s;
  s.endpoint_a = a;
  s.endpoint_b = b;
  s.rest_length = norm(masses.at(b).position - masses.at(a).position);
  s.stiffness = stiffness;
  s.damping = damping;
  springs.push_back(s);
  return static_cast<std::uint32_t>(springs.size() - 1);
}

void validate(const SimState& state) {
  using K = SimulationError::Kind;
  if (!(state.dt > 0.0) || !std::isfinite(state.dt))
    throw SimulationError(K::InvalidState, 0, state.step_count, "time step must be positive");
  for (std::size_t i = 0; i < state.masses.size(); ++i) {
    const MassPoint& p = state.masses[i];
    if (!(p.mass > 0.0) || !std::isfinite(p.mass))
      throw SimulationError(K::InvalidState, i, state.step_count,
                            describe("non-positive mass at index", i, state.step_count));
    if (!is_finite(p.position) || !is_finite(p.velocity))
      throw SimulationError(K::NonFiniteState, i, state.step_count,
                            describe("non-finite state at mass", i, state.step_count));
  }
  const std::size_t n = state.masses.size();
  for (std::size_t s = 0; s < state.springs.size(); ++s) {
    const SpringElement& e = state.springs[s];
    if (e.endpoint_a >= n || e.endpoint_b >= n || e.endpoint_a == e.endpoint_b)
      throw SimulationError(K::InvalidState, s, state.step_count,
                            describe("invalid endpoints on spring", s, state.step_count));
    if (e.rest_length < 0.0 || !(e.stiffness >= 0.0) || !(e.damping >= 0.0))
      throw SimulationError(K::InvalidState, s, state.step_count,
                            describe("invalid parameters on spring", s, state.step_count));
  }
}

std::uint64_t compute_spring_forces(const SimState& state, std::span<Vec3> out, int workers) {
  const std::int64_t n = static_cast<std::int64_t>(state.springs.size());
  const SpringElement* springs = state.springs.data();
  const MassPoint* masses = state.masses.data();
  std::size_t bad = kNoIndex;
  std::uint64_t evaluated = 0;

#pragma omp parallel for num_threads(resolve_workers(workers)) schedule(static) reduction(min : bad) \
    reduction(+ : evaluated)
  for (std::int64_t s = 0; s < n; ++s) {
    ++evaluated;
    const SpringElement& e = springs[s];
    const MassPoint& a = masses[e.endpoint_a];
    const MassPoint& b = masses[e.endpoint_b];
    const Vec3 d = b.position - a.position;
    const double length = norm(d);
    if (length < kDegenerateLength) {
      out[s] = Vec3{};
      if (e.rest_length > 0.0) bad = std::min(bad, static_cast<std::size_t>(s));
      continue;
    }
    const Vec3 axis = d / length;
    const double axial_rate = dot(b.velocity - a.velocity, axis);
    const double magnitude = e.stiffness * (length - e.rest_length) + e.damping * axial_rate;
    out[s] = axis * magnitude;
  }

  if (bad != kNoIndex)
    throw SimulationError(SimulationError::Kind::DegenerateSpring, bad, state.step_count,
                          describe("degenerate (zero-length) spring", bad, state.step_count));
  return evaluated;
}

Vec3 contact_force(const MassPoint& p, const ContactModel& contact, double dt) {
  if (!contact.enabled || !(p.position.z < contact.ground_height)) return Vec3{};
  const double penetration = contact.ground_height - p.position.z;
  double normal = contact.normal_stiffness * penetration - contact.normal_damping * p.velocity.z;
  if (!(normal > 0.0)) return Vec3{};

  const double vx = p.velocity.x;
  const double vy = p.velocity.y;
  const double speed = std::sqrt(vx * vx + vy * vy);
  if (!(speed > 0.0)) return Vec3{0.0, 0.0, normal};
  const double limit = contact.friction_coefficient * normal;
  const double stop = p.mass * speed / dt;
  const double tangential = std::min(limit, stop);
  const double scale = tangential / speed;
  return Vec3{-vx * scale, -vy * scale, normal};
}

void compute_contact_forces(const SimState& state, std::span<Vec3> out, int workers) {
  const std::int64_t n = static_cast<std::int64_t>(state.masses.size());
#pragma omp parallel for num_threads(resolve_workers(workers)) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = contact_force(state.masses[i], state.contact, state.dt);
}

Incidence Incidence::build(const SimState& state) {
  Incidence inc;
  const std::size_t n = state.masses.size();
  inc.offsets.assign(n + 1, 0);
  for (const SpringElement& e : state.springs) {
    ++inc.offsets[e.endpoint_a + 1];
    ++inc.offsets[e.endpoint_b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) inc.offsets[i + 1] += inc.offsets[i];

  inc.spring.resize(2 * state.springs.size());
  inc.sign.resize(2 * state.springs.size());
  std::vector<std::uint32_t> cursor(inc.offsets.begin(), inc.offsets.end() - 1);
  // Walking springs in ascending order leaves every per-mass list sorted.
  for (std::size_t s = 0; s < state.springs.size(); ++s) {
    const SpringElement& e = state.springs[s];
    const std::uint32_t ia = cursor[e.endpoint_a]++;
    inc.spring[ia] = static_cast<std::uint32_t>(s);
    inc.sign[ia] = 1;
    const std::uint32_t ib = cursor[e.endpoint_b]++;
    inc.spring[ib] = static_cast<std::uint32_t>(s);
    inc.sign[ib] = -1;
  }
  return inc;
}

void accumulate_and_integrate(SimState& state, std::span<const Vec3> spring_forces,
                              const Incidence& incidence, int workers) {
  const std::int64_t n = static_cast<std::int64_t>(state.masses.size());
  const double dt = state.dt;
  const Vec3 gravity = state.gravity;
  const double drag = state.drag;
  const ContactModel contact = state.contact;
  MassPoint* masses = state.masses.data();
  const std::uint32_t* offsets = incidence.offsets.data();
  const std::uint32_t* spring = incidence.spring.data();
  const std::int8_t* sign = incidence.sign.data();

  std::size_t bad = kNoIndex;
#pragma omp parallel num_threads(resolve_workers(workers))
  {
#pragma omp for schedule(static) reduction(min : bad)
    for (std::int64_t i = 0; i < n; ++i) {
      MassPoint& p = masses[i];
      Vec3 f;
      for (std::uint32_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        if (sign[k] > 0)
          f += spring_forces[spring[k]];
        else
          f -= spring_forces[spring[k]];
      }
      f += gravity * p.mass;
      f += contact_force(p, contact, dt);
      if (drag != 0.0) f -= p.velocity * (drag * p.mass);
      f += p.external_force;
      p.force_accum = f;
      if (!is_finite(f)) bad = std::min(bad, static_cast<std::size_t>(i));
    }
  }
  if (bad != kNoIndex)
    throw SimulationError(SimulationError::Kind::NonFiniteState, bad, state.step_count,
                          describe("non-finite force on mass", bad, state.step_count));

#pragma omp parallel for num_threads(resolve_workers(workers)) schedule(static) reduction(min : bad)
  for (std::int64_t i = 0; i < n; ++i) {
    MassPoint& p = masses[i];
    if (p.fixed) {
      p.velocity = Vec3{};
      continue;
    }
    p.velocity += (p.force_accum / p.mass) * dt;
    p.position += p.velocity * dt;
    if (!is_finite(p.position) || !is_finite(p.velocity)) bad = std::min(bad, static_cast<std::size_t>(i));
  }
  if (bad != kNoIndex)
    throw SimulationError(SimulationError::Kind::NonFiniteState, bad, state.step_count,
                          describe("non-finite position on mass", bad, state.step_count));
  ++state.step_count;
}

void Stepper::step(SimState& state) {
  if (!incidence_valid_ || cached_masses_ != state.masses.size() ||
      cached_springs_ != state.springs.size()) {
    validate(state);
    incidence_ = Incidence::build(state);
    cached_masses_ = state.masses.size();
    cached_springs_ = state.springs.size();
    incidence_valid_ = true;
  }
  spring_forces_.resize(state.springs.size());
  spring_evaluations_ += compute_spring_forces(state, spring_forces_, workers_);
  accumulate_and_integrate(state, spring_forces_, incidence_, workers_);
}

void run_steps(SimState& state, Stepper& stepper, std::int64_t n_steps, std::int64_t stride,
               const TrajectorySink& sink) {
  for (std::int64_t i = 0; i < n_steps; ++i) {
    stepper.step(state);
    if (sink && stride > 0 && state.step_count % stride == 0) sink(state);
  }
}

Vec3 linear_momentum(const SimState& state) {
  Vec3 p;
  for (const MassPoint& m : state.masses) p += m.velocity * m.mass;
  return p;
}

Vec3 center_of_mass(const SimState& state) {
  Vec3 c;
  double total = 0.0;
  for (const MassPoint& m : state.masses) {
    c += m.position * m.mass;
    total += m.mass;
  }
  return total > 0.0 ? c / total : c;
}

double kinetic_energy(const SimState& state) {
  double e = 0.0;
  for (const MassPoint& m : state.masses) e += 0.5 * m.mass * squared_norm(m.velocity);
  return e;
}

double potential_energy(const SimState& state) {
  double e = 0.0;
  for (const SpringElement& s : state.springs) {
    const double stretch =
        norm(state.masses[s.endpoint_b].position - state.masses[s.endpoint_a].position) - s.rest_length;
    e += 0.5 * s.stiffness * stretch * stretch;
  }
  for (const MassPoint& m : state.masses) {
    e -= m.mass * dot(state.gravity, m.position);
    if (state.contact.enabled && m.position.z < state.contact.ground_height) {
      const double pen = state.contact.ground_height - m.position.z;
      e += 0.5 * state.contact.normal_stiffness * pen * pen;
    }
  }
  return e;
}

ThroughputReport throughput_benchmark(SimState& state, std::int64_t n_steps, int workers) {
  if (n_steps < 1) throw std::invalid_argument("throughput_benchmark: n_steps must be >= 1");
  Stepper stepper(workers);
  const auto start = std::chrono::steady_clock::now();
  for (std::int64_t i = 0; i < n_steps; ++i) stepper.step(state);
  const auto stop = std::chrono::steady_clock::now();

  ThroughputReport r;
  r.springs = state.springs.size();
  r.masses = state.masses.size();
  r.steps = static_cast<std::uint64_t>(n_steps);
  r.spring_evaluations = stepper.spring_evaluations();
  r.workers = resolve_workers(workers);
  r.wall_seconds = std::chrono::duration<double>(stop - start).count();
  r.dt = state.dt;
  if (r.wall_seconds > 0.0) {
    r.evaluations_per_second = static_cast<double>(r.spring_evaluations) / r.wall_seconds;
    r.steps_per_second = static_cast<double>(r.steps) / r.wall_seconds;
    r.real_time_factor = static_cast<double>(r.steps) * state.dt / r.wall_seconds;
  }
  return r;
}

}  // namespace flexisim
