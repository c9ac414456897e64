#pragma once

#include "flexisim/vec3.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexisim {

//! Default physics update interval (s).
inline constexpr double kDefaultTimeStep = 5.0e-5;

//! Springs shorter than this (m) have no defined direction.
inline constexpr double kDegenerateLength = 1.0e-9;

//! Point mass of the lattice.
struct MassPoint {
  Vec3 position;        //!< m
  Vec3 velocity;        //!< m/s
  double mass = 1.0;    //!< kg, > 0
  Vec3 force_accum;     //!< N, total force applied during the last step
  Vec3 external_force;  //!< N, constant applied load (test rigs, deflection probes)
  bool fixed = false;   //!< pinned in space; velocity stays exactly zero
};

//! Linear spring with axial viscous damping between two masses.
struct SpringElement {
  std::uint32_t endpoint_a = 0;
  std::uint32_t endpoint_b = 0;
  double rest_length = 0.0;  //!< m
  double stiffness = 0.0;    //!< N/m
  double damping = 0.0;      //!< N*s/m
};

//! Penalty ground plane z = ground_height with capped Coulomb friction.
struct ContactModel {
  bool enabled = true;
  double ground_height = 0.0;         //!< m
  double normal_stiffness = 2.0e4;    //!< N/m
  double normal_damping = 20.0;       //!< N*s/m
  double friction_coefficient = 0.8;  //!< dimensionless
};

struct SimState {
  std::vector<MassPoint> masses;
  std::vector<SpringElement> springs;
  ContactModel contact;
  Vec3 gravity{0.0, 0.0, -9.81};  //!< m/s^2
  double drag = 0.0;               //!< 1/s, velocity-proportional drag per unit mass
  double dt = kDefaultTimeStep;    //!< s
  std::int64_t step_count = 0;

  //! Always step_count * dt, so the two can never drift apart.
  double sim_time() const { return static_cast<double>(step_count) * dt; }

  std::uint32_t add_mass(const Vec3& position, double mass, bool fixed = false);
  std::uint32_t add_spring(std::uint32_t a, std::uint32_t b, double stiffness, double damping);
};

//! Raised when a step cannot be completed. `index` names the offending
//! spring or mass depending on `kind`.
class SimulationError : public std::runtime_error {
 public:
  enum class Kind { DegenerateSpring, NonFiniteState, InvalidState };

  SimulationError(Kind kind, std::size_t index, std::int64_t step, const std::string& what)
      : std::runtime_error(what), kind_(kind), index_(index), step_(step) {}

  Kind kind() const { return kind_; }
  std::size_t index() const { return index_; }
  std::int64_t step() const { return step_; }

 private:
  Kind kind_;
  std::size_t index_;
  std::int64_t step_;
};

//! Throws SimulationError(InvalidState) if masses are non-positive, springs
//! reference missing masses or are self-loops, or dt is not positive.
void validate(const SimState& state);

// ---------------------------------------------------------------------------
// Kernels. Each may run on several OpenMP workers; results are bit-identical
// to single-worker execution.

//! Force on endpoint_a of every spring (endpoint_b receives the negation).
//! Writes one entry per spring into `out` and returns the number of springs
//! evaluated. Throws on a degenerate spring.
std::uint64_t compute_spring_forces(const SimState& state, std::span<Vec3> out, int workers = 0);

//! Ground reaction on a single mass. Exactly zero at or above the ground.
Vec3 contact_force(const MassPoint& p, const ContactModel& contact, double dt);

void compute_contact_forces(const SimState& state, std::span<Vec3> out, int workers = 0);

//! CSR incidence list: for each mass, its springs in ascending index order
//! with the sign of the contribution (+1 for endpoint_a, -1 for endpoint_b).
struct Incidence {
  std::vector<std::uint32_t> offsets;  // masses + 1
  std::vector<std::uint32_t> spring;   // 2 * springs
  std::vector<std::int8_t> sign;       // 2 * springs

  static Incidence build(const SimState& state);
  std::size_t mass_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

//! Per-mass gather of spring contributions (ascending spring order), then
//! gravity, contact, drag and external load; then semi-implicit Euler.
void accumulate_and_integrate(SimState& state, std::span<const Vec3> spring_forces,
                              const Incidence& incidence, int workers = 0);

//! Owns the scratch buffers for repeated stepping of one SimState.
//! Topology (the incidence list) is rebuilt whenever the mass or spring
//! count changes; call invalidate() after editing spring endpoints in place.
class Stepper {
 public:
  explicit Stepper(int workers = 0) : workers_(workers) {}

  void step(SimState& state);
  void invalidate() { incidence_valid_ = false; }

  int workers() const { return workers_; }
  void set_workers(int workers) { workers_ = workers; }

  std::span<const Vec3> spring_forces() const { return spring_forces_; }
  //! Spring force evaluations performed by this stepper so far.
  std::uint64_t spring_evaluations() const { return spring_evaluations_; }

 private:
  int workers_;
  bool incidence_valid_ = false;
  std::size_t cached_masses_ = 0;
  std::size_t cached_springs_ = 0;
  Incidence incidence_;
  std::vector<Vec3> spring_forces_;
  std::uint64_t spring_evaluations_ = 0;
};

//! Called with the state after every `stride`-th step.
using TrajectorySink = std::function<void(const SimState&)>;

void run_steps(SimState& state, Stepper& stepper, std::int64_t n_steps, std::int64_t stride = 0,
               const TrajectorySink& sink = {});

// ---------------------------------------------------------------------------
// Observables

Vec3 linear_momentum(const SimState& state);
Vec3 center_of_mass(const SimState& state);
double kinetic_energy(const SimState& state);
//! Springs + gravity + contact penalty.
double potential_energy(const SimState& state);
inline double mechanical_energy(const SimState& state) {
  return kinetic_energy(state) + potential_energy(state);
}

// ---------------------------------------------------------------------------

struct ThroughputReport {
  std::uint64_t springs = 0;
  std::uint64_t masses = 0;
  std::uint64_t steps = 0;
  std::uint64_t spring_evaluations = 0;  //!< counted by the stepper; equals springs * steps
  double wall_seconds = 0.0;
  double evaluations_per_second = 0.0;
  double steps_per_second = 0.0;
  double real_time_factor = 0.0;  //!< simulated seconds per wall second
  double dt = 0.0;
  int workers = 0;
};

//! Steps `state` n_steps times and times it. n_steps must be >= 1.
ThroughputReport throughput_benchmark(SimState& state, std::int64_t n_steps, int workers = 0);

//! Number of workers OpenMP would use for `requested` (0 = runtime default).
int resolve_workers(int requested);

}  // namespace flexisim
