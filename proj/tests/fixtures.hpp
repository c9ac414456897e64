#pragma once

// Shared helpers for the geometry tests and the acceptance run.

#include "flexisim/geometry.hpp"
#include "flexisim/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fixtures {

using namespace flexisim;

// Observed range of the saturated dart-throwing oracle (oracles.hpp) over
// seeds 1..50 on the unit box at radius 0.1 with 20000 consecutive misses
// as the stop rule. Regenerate with the poisson_oracle target.
inline constexpr std::size_t kOracleBoxMin = 764;
inline constexpr std::size_t kOracleBoxMax = 805;

inline double min_pair_distance(const std::vector<Vec3>& pts) {
  double best = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, norm(pts[i] - pts[j]));
  return best;
}

inline Pose random_pose(Rng& rng) {
  Vec3 axis{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  if (norm(axis) < 1e-3) axis = {0, 0, 1};
  return Pose{Mat3::rotation(normalized(axis), rng.uniform(0, 2 * std::numbers::pi)),
              {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}};
}

inline SolidShape random_shape(Rng& rng) {
  const Pose pose = random_pose(rng);
  switch (rng.below(5)) {
    case 0:
      return SolidShape(Box{{rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.4), rng.uniform(0.05, 0.3)}}, pose);
    case 1: {
      const Vec3 size{rng.uniform(0.2, 0.4), rng.uniform(0.2, 0.4), rng.uniform(0.15, 0.3)};
      return SolidShape(BoxShell{size, rng.uniform(0.03, 0.06)}, pose);
    }
    case 2:
      return SolidShape(Cylinder{rng.uniform(0.05, 0.15), rng.uniform(0.1, 0.4)}, pose);
    case 3:
      return SolidShape(Frustum{rng.uniform(0.05, 0.15), rng.uniform(0.02, 0.15), rng.uniform(0.1, 0.4)}, pose);
    default: {
      const double rb = rng.uniform(0.08, 0.15), rt = rng.uniform(0.06, 0.12);
      return SolidShape(HollowFrustum{rb, rt, rb * rng.uniform(0.3, 0.6), rt * rng.uniform(0.3, 0.6),
                                      rng.uniform(0.1, 0.3)},
                        pose);
    }
  }
}

}  // namespace fixtures
