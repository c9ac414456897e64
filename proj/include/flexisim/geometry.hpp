#pragma once

#include "flexisim/spring_core.hpp"
#include "flexisim/vec3.hpp"

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

namespace flexisim {

//! Rigid transform taking local shape coordinates to world coordinates.
struct Pose {
  Mat3 rotation;  //!< orthonormal
  Vec3 translation;

  Vec3 to_world(const Vec3& local) const { return rotation * local + translation; }
  Vec3 to_local(const Vec3& world) const { return rotation.transposed() * (world - translation); }
};

struct Aabb {
  Vec3 lo;
  Vec3 hi;
};

// Primitive parameterizations, all in the local frame.

//! Axis-aligned box centred on the origin.
struct Box {
  Vec3 size;
};

//! Box of outer `size` whose interior is hollowed, leaving walls of `wall`.
struct BoxShell {
  Vec3 size;
  double wall = 0.0;
};

//! Circular cylinder along +z from z = 0 to z = length.
struct Cylinder {
  double radius = 0.0;
  double length = 0.0;
};

//! Truncated cone along +z; radius_base at z = 0, radius_top at z = length.
struct Frustum {
  double radius_base = 0.0;
  double radius_top = 0.0;
  double length = 0.0;
};

//! Frustum with a coaxial frustum-shaped bore.
struct HollowFrustum {
  double radius_base = 0.0;
  double radius_top = 0.0;
  double inner_radius_base = 0.0;
  double inner_radius_top = 0.0;
  double length = 0.0;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SolidShape {
 public:
  using Params = std::variant<Box, BoxShell, Cylinder, Frustum, HollowFrustum>;

  SolidShape(Params params, Pose pose = {});

  const Params& params() const { return params_; }
  const Pose& pose() const { return pose_; }
  void set_pose(const Pose& pose) { pose_ = pose; }

  //! Closed point-membership test in world coordinates.
  bool contains(const Vec3& world) const;
  bool contains_local(const Vec3& local) const;

  Aabb local_bounds() const;
  Aabb world_bounds() const;
  double volume() const;

 private:
  Params params_;
  Pose pose_;
};

struct SampledPart {
  std::vector<Vec3> points;
  SolidShape source;
  double sample_radius = 0.0;
  double part_mass = 0.0;

  double point_mass() const { return points.empty() ? 0.0 : part_mass / static_cast<double>(points.size()); }
};

//! Volumetric Poisson-disk sampling: Bridson-style active-list dart
//! throwing on a background grid, followed by a completion sweep over a
//! shuffled jittered candidate lattice so the set is close to maximal.
//! Every pair of points is at least `radius` apart; output depends only on
//! the inputs and `seed`.
SampledPart poisson_sample(const SolidShape& shape, double radius, std::uint64_t seed,
                           double part_mass = 1.0);

struct ConnectResult {
  std::vector<SpringElement> springs;  //!< indices local to the part, sorted by (a, b), a < b
  std::size_t component_count = 0;

  bool connected() const { return component_count <= 1; }
};

//! One spring per unordered pair of points no farther apart than
//! `connect_radius`, with rest length equal to the current distance.
ConnectResult connect_springs(const std::vector<Vec3>& points, double connect_radius,
                              double stiffness, double damping);

inline ConnectResult connect_springs(const SampledPart& part, double connect_radius,
                                     double stiffness, double damping) {
  return connect_springs(part.points, connect_radius, stiffness, damping);
}

}  // namespace flexisim
