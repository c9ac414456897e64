#include "flexisim/geometry.hpp"

#include "flexisim/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace flexisim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw GeometryError(std::string(what) + " must be positive");
}

double lerp_radius(double base, double top, double z, double length) {
  return base + (top - base) * (z / length);
}

}  // namespace

SolidShape::SolidShape(Params params, Pose pose) : params_(std::move(params)), pose_(pose) {
  std::visit(Overloaded{
                 [](const Box& b) {
                   require_positive(b.size.x, "box size x");
                   require_positive(b.size.y, "box size y");
                   require_positive(b.size.z, "box size z");
                 },
                 [](const BoxShell& b) {
                   require_positive(b.size.x, "shell size x");
                   require_positive(b.size.y, "shell size y");
                   require_positive(b.size.z, "shell size z");
                   require_positive(b.wall, "shell wall");
                 },
                 [](const Cylinder& c) {
                   require_positive(c.radius, "cylinder radius");
                   require_positive(c.length, "cylinder length");
                 },
                 [](const Frustum& f) {
                   require_positive(f.radius_base, "frustum base radius");
                   require_positive(f.radius_top, "frustum top radius");
                   require_positive(f.length, "frustum length");
                 },
                 [](const HollowFrustum& f) {
                   require_positive(f.radius_base, "frustum base radius");
                   require_positive(f.radius_top, "frustum top radius");
                   require_positive(f.inner_radius_base, "frustum inner base radius");
                   require_positive(f.inner_radius_top, "frustum inner top radius");
                   require_positive(f.length, "frustum length");
                   // Radii are linear in z, so checking both ends covers the whole axis.
                   if (!(f.inner_radius_base < f.radius_base) || !(f.inner_radius_top < f.radius_top))
                     throw GeometryError("hollow frustum inner radius must be below outer radius");
                 },
             },
             params_);
}

bool SolidShape::contains_local(const Vec3& p) const {
  return std::visit(
      Overloaded{
          [&](const Box& b) {
            return std::abs(p.x) <= 0.5 * b.size.x && std::abs(p.y) <= 0.5 * b.size.y &&
                   std::abs(p.z) <= 0.5 * b.size.z;
          },
          [&](const BoxShell& b) {
            const double hx = 0.5 * b.size.x, hy = 0.5 * b.size.y, hz = 0.5 * b.size.z;
            const double ax = std::abs(p.x), ay = std::abs(p.y), az = std::abs(p.z);
            if (ax > hx || ay > hy || az > hz) return false;
            return ax >= hx - b.wall || ay >= hy - b.wall || az >= hz - b.wall;
          },
          [&](const Cylinder& c) {
            return p.z >= 0.0 && p.z <= c.length && p.x * p.x + p.y * p.y <= c.radius * c.radius;
          },
          [&](const Frustum& f) {
            if (p.z < 0.0 || p.z > f.length) return false;
            const double r = lerp_radius(f.radius_base, f.radius_top, p.z, f.length);
            return p.x * p.x + p.y * p.y <= r * r;
          },
          [&](const HollowFrustum& f) {
            if (p.z < 0.0 || p.z > f.length) return false;
            const double r = lerp_radius(f.radius_base, f.radius_top, p.z, f.length);
            const double ri = lerp_radius(f.inner_radius_base, f.inner_radius_top, p.z, f.length);
            const double rr = p.x * p.x + p.y * p.y;
            return rr <= r * r && rr >= ri * ri;
          },
      },
      params_);
}

bool SolidShape::contains(const Vec3& world) const { return contains_local(pose_.to_local(world)); }

Aabb SolidShape::local_bounds() const {
  return std::visit(Overloaded{
                        [](const Box& b) { return Aabb{b.size * -0.5, b.size * 0.5}; },
                        [](const BoxShell& b) { return Aabb{b.size * -0.5, b.size * 0.5}; },
                        [](const Cylinder& c) {
                          return Aabb{{-c.radius, -c.radius, 0.0}, {c.radius, c.radius, c.length}};
                        },
                        [](const Frustum& f) {
                          const double r = std::max(f.radius_base, f.radius_top);
                          return Aabb{{-r, -r, 0.0}, {r, r, f.length}};
                        },
                        [](const HollowFrustum& f) {
                          const double r = std::max(f.radius_base, f.radius_top);
                          return Aabb{{-r, -r, 0.0}, {r, r, f.length}};
                        },
                    },
                    params_);
}

Aabb SolidShape::world_bounds() const {
  const Aabb l = local_bounds();
  Aabb w{{INFINITY, INFINITY, INFINITY}, {-INFINITY, -INFINITY, -INFINITY}};
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner{(c & 1) ? l.hi.x : l.lo.x, (c & 2) ? l.hi.y : l.lo.y, (c & 4) ? l.hi.z : l.lo.z};
    const Vec3 p = pose_.to_world(corner);
    w.lo = {std::min(w.lo.x, p.x), std::min(w.lo.y, p.y), std::min(w.lo.z, p.z)};
    w.hi = {std::max(w.hi.x, p.x), std::max(w.hi.y, p.y), std::max(w.hi.z, p.z)};
  }
  return w;
}

double SolidShape::volume() const {
  constexpr double pi = std::numbers::pi;
  auto cone = [](double r0, double r1, double len) { return pi * len / 3.0 * (r0 * r0 + r0 * r1 + r1 * r1); };
  return std::visit(Overloaded{
                        [](const Box& b) { return b.size.x * b.size.y * b.size.z; },
                        [](const BoxShell& b) {
                          const double ix = std::max(0.0, b.size.x - 2.0 * b.wall);
                          const double iy = std::max(0.0, b.size.y - 2.0 * b.wall);
                          const double iz = std::max(0.0, b.size.z - 2.0 * b.wall);
                          return b.size.x * b.size.y * b.size.z - ix * iy * iz;
                        },
                        [](const Cylinder& c) { return pi * c.radius * c.radius * c.length; },
                        [&](const Frustum& f) { return cone(f.radius_base, f.radius_top, f.length); },
                        [&](const HollowFrustum& f) {
                          return cone(f.radius_base, f.radius_top, f.length) -
                                 cone(f.inner_radius_base, f.inner_radius_top, f.length);
                        },
                    },
                    params_);
}

// ---------------------------------------------------------------------------

namespace {

// Background grid with cells of edge radius/sqrt(3): at most one sample per cell.
class SampleGrid {
 public:
  SampleGrid(const Aabb& bounds, double radius) : lo_(bounds.lo), radius_(radius) {
    cell_ = radius / std::sqrt(3.0);
    const Vec3 ext = bounds.hi - bounds.lo;
    nx_ = static_cast<std::int64_t>(std::floor(ext.x / cell_)) + 1;
    ny_ = static_cast<std::int64_t>(std::floor(ext.y / cell_)) + 1;
    nz_ = static_cast<std::int64_t>(std::floor(ext.z / cell_)) + 1;
    const double total = static_cast<double>(nx_) * static_cast<double>(ny_) * static_cast<double>(nz_);
    if (total > 2.0e8) throw GeometryError("sample radius too small for shape extent");
    cells_.assign(static_cast<std::size_t>(nx_ * ny_ * nz_), -1);
  }

  bool fits(const Vec3& p, const std::vector<Vec3>& points) const {
    const auto [ix, iy, iz] = cell_of(p);
    for (std::int64_t z = std::max<std::int64_t>(0, iz - 2); z <= std::min(nz_ - 1, iz + 2); ++z)
      for (std::int64_t y = std::max<std::int64_t>(0, iy - 2); y <= std::min(ny_ - 1, iy + 2); ++y)
        for (std::int64_t x = std::max<std::int64_t>(0, ix - 2); x <= std::min(nx_ - 1, ix + 2); ++x) {
          const std::int32_t k = cells_[index(x, y, z)];
          if (k >= 0 && norm(points[static_cast<std::size_t>(k)] - p) < radius_) return false;
        }
    return true;
  }

  void insert(const Vec3& p, std::int32_t k) {
    const auto [ix, iy, iz] = cell_of(p);
    cells_[index(ix, iy, iz)] = k;
  }

 private:
  std::array<std::int64_t, 3> cell_of(const Vec3& p) const {
    auto clampi = [](double v, std::int64_t n) {
      return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(v)), 0, n - 1);
    };
    return {clampi((p.x - lo_.x) / cell_, nx_), clampi((p.y - lo_.y) / cell_, ny_),
            clampi((p.z - lo_.z) / cell_, nz_)};
  }
  std::size_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return static_cast<std::size_t>((z * ny_ + y) * nx_ + x);
  }

  Vec3 lo_;
  double radius_;
  double cell_;
  std::int64_t nx_, ny_, nz_;
  std::vector<std::int32_t> cells_;
};

Vec3 random_in_box(Rng& rng, const Aabb& b) {
  return {rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y), rng.uniform(b.lo.z, b.hi.z)};
}

// Uniform over the spherical shell radius <= |d| <= 2 radius.
Vec3 random_shell_offset(Rng& rng, double radius) {
  Vec3 d;
  double n2;
  do {
    d = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    n2 = squared_norm(d);
  } while (n2 > 1.0 || n2 < 1e-12);
  const double r = radius * std::cbrt(1.0 + 7.0 * rng.uniform());
  return d * (r / std::sqrt(n2));
}

constexpr int kCandidatesPerActive = 30;
constexpr int kSeedAttempts = 1000;
// Candidate lattice spacing radius / 6. Coarser lattices leave the set
// visibly short of saturation (about 10% fewer points at radius / 3).
constexpr int kCompletionDivisions = 6;

}  // namespace

SampledPart poisson_sample(const SolidShape& shape, double radius, std::uint64_t seed, double part_mass) {
  require_positive(radius, "sample radius");
  const Aabb bounds = shape.world_bounds();
  SampleGrid grid(bounds, radius);
  Rng rng(seed);
  std::vector<Vec3> points;

  auto accept = [&](const Vec3& p) {
    grid.insert(p, static_cast<std::int32_t>(points.size()));
    points.push_back(p);
  };

  for (int attempt = 0; attempt < kSeedAttempts; ++attempt) {
    const Vec3 p = random_in_box(rng, bounds);
    if (shape.contains(p)) {
      accept(p);
      break;
    }
  }

  std::vector<std::size_t> active;
  if (!points.empty()) active.push_back(0);
  while (!active.empty()) {
    const std::size_t slot = static_cast<std::size_t>(rng.below(active.size()));
    const Vec3 origin = points[active[slot]];
    bool placed = false;
    for (int k = 0; k < kCandidatesPerActive; ++k) {
      const Vec3 c = origin + random_shell_offset(rng, radius);
      if (!shape.contains(c) || !grid.fits(c, points)) continue;
      active.push_back(points.size());
      accept(c);
      placed = true;
      break;
    }
    if (!placed) {
      active[slot] = active.back();
      active.pop_back();
    }
  }

  // Completion sweep: fill the gaps the active list left behind.
  const double h = radius / kCompletionDivisions;
  const Vec3 ext = bounds.hi - bounds.lo;
  const std::int64_t cx = static_cast<std::int64_t>(std::ceil(ext.x / h)) + 1;
  const std::int64_t cy = static_cast<std::int64_t>(std::ceil(ext.y / h)) + 1;
  const std::int64_t cz = static_cast<std::int64_t>(std::ceil(ext.z / h)) + 1;
  std::vector<Vec3> candidates;
  candidates.reserve(static_cast<std::size_t>(cx * cy * cz));
  for (std::int64_t z = 0; z < cz; ++z)
    for (std::int64_t y = 0; y < cy; ++y)
      for (std::int64_t x = 0; x < cx; ++x) {
        const Vec3 c{bounds.lo.x + (static_cast<double>(x) + rng.uniform()) * h,
                     bounds.lo.y + (static_cast<double>(y) + rng.uniform()) * h,
                     bounds.lo.z + (static_cast<double>(z) + rng.uniform()) * h};
        if (shape.contains(c)) candidates.push_back(c);
      }
  rng.shuffle(candidates);
  for (const Vec3& c : candidates)
    if (grid.fits(c, points)) accept(c);

  if (points.empty()) throw GeometryError("shape too thin to place any sample");

  SampledPart part{std::move(points), shape, radius, part_mass};
  return part;
}

// ---------------------------------------------------------------------------

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ConnectResult connect_springs(const std::vector<Vec3>& points, double connect_radius, double stiffness,
                              double damping) {
  ConnectResult result;
  const std::size_t n = points.size();
  DisjointSets sets(n);

  if (connect_radius > 0.0 && n > 1) {
    auto key_of = [&](const Vec3& p) {
      return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::floor(p.x / connect_radius)),
                                         static_cast<std::int64_t>(std::floor(p.y / connect_radius)),
                                         static_cast<std::int64_t>(std::floor(p.z / connect_radius))};
    };
    auto hash = [](const std::array<std::int64_t, 3>& k) {
      return static_cast<std::size_t>(k[0] * 73856093LL ^ k[1] * 19349663LL ^ k[2] * 83492791LL);
    };
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::uint32_t>, decltype(hash)> cells(
        n, hash);
    for (std::size_t i = 0; i < n; ++i) cells[key_of(points[i])].push_back(static_cast<std::uint32_t>(i));

    for (std::size_t i = 0; i < n; ++i) {
      const auto k = key_of(points[i]);
      for (std::int64_t dz = -1; dz <= 1; ++dz)
        for (std::int64_t dy = -1; dy <= 1; ++dy)
          for (std::int64_t dx = -1; dx <= 1; ++dx) {
            const auto it = cells.find({k[0] + dx, k[1] + dy, k[2] + dz});
            if (it == cells.end()) continue;
            for (std::uint32_t j : it->second) {
              if (j <= i) continue;
              const double d = norm(points[j] - points[i]);
              if (d > connect_radius) continue;
              SpringElement s;
              s.endpoint_a = static_cast<std::uint32_t>(i);
              s.endpoint_b = j;
              s.rest_length = d;
              s.stiffness = stiffness;
              s.damping = damping;
              result.springs.push_back(s);
              sets.unite(i, j);
            }
          }
    }
    std::sort(result.springs.begin(), result.springs.end(), [](const SpringElement& a, const SpringElement& b) {
      return a.endpoint_a != b.endpoint_a ? a.endpoint_a < b.endpoint_a : a.endpoint_b < b.endpoint_b;
    });
  }

  for (std::size_t i = 0; i < n; ++i)
    if (sets.find(i) == i) ++result.component_count;
  return result;
}

}  // namespace flexisim
