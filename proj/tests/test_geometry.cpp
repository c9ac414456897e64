#include "flexisim/geometry.hpp"
#include "flexisim/random.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

using namespace flexisim;
using namespace fixtures;

namespace {

std::vector<Vec3> grid3(double h) {
  std::vector<Vec3> pts;
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) pts.push_back({x * h, y * h, z * h});
  return pts;
}

std::vector<std::tuple<Vec3, Vec3, double>> canonical(const std::vector<Vec3>& pts, const ConnectResult& r) {
  std::vector<std::tuple<Vec3, Vec3, double>> out;
  for (const SpringElement& s : r.springs) {
    Vec3 a = pts[s.endpoint_a], b = pts[s.endpoint_b];
    if (std::tie(b.x, b.y, b.z) < std::tie(a.x, a.y, a.z)) std::swap(a, b);
    out.emplace_back(a, b, s.rest_length);
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    const Vec3 &la = std::get<0>(l), &lb = std::get<1>(l), &ra = std::get<0>(r), &rb = std::get<1>(r);
    return std::tie(la.x, la.y, la.z, lb.x, lb.y, lb.z) < std::tie(ra.x, ra.y, ra.z, rb.x, rb.y, rb.z);
  });
  return out;
}

}  // namespace

TEST(Shapes, MembershipOfPrimitives) {
  const SolidShape box(Box{{2, 1, 1}});
  EXPECT_TRUE(box.contains({1, 0.5, -0.5}));  // closed
  EXPECT_FALSE(box.contains({1.0001, 0, 0}));
  const SolidShape shell(BoxShell{{1, 1, 1}, 0.1});
  EXPECT_TRUE(shell.contains({0.45, 0, 0}));
  EXPECT_FALSE(shell.contains({0, 0, 0}));
  const SolidShape cone(Frustum{1.0, 0.5, 2.0});
  EXPECT_TRUE(cone.contains({0.74, 0, 1.0}));
  EXPECT_FALSE(cone.contains({0.76, 0, 1.0}));
  const SolidShape tube(HollowFrustum{1.0, 0.5, 0.5, 0.25, 2.0});
  EXPECT_FALSE(tube.contains({0.3, 0, 1.0}));
  EXPECT_TRUE(tube.contains({0.5, 0, 1.0}));
  EXPECT_FALSE(tube.contains({0.5, 0, 2.1}));
}

TEST(Shapes, PoseMovesMembership) {
  Pose pose{Mat3::rotation({0, 0, 1}, std::numbers::pi / 2), {5, 0, 0}};
  const SolidShape box(Box{{2, 0.2, 0.2}}, pose);
  EXPECT_TRUE(box.contains({5, 0.9, 0}));
  EXPECT_FALSE(box.contains({5.9, 0, 0}));
}

TEST(Shapes, InvalidDimensionsRejected) {
  EXPECT_THROW(SolidShape(Box{{1, 0, 1}}), GeometryError);
  EXPECT_THROW(SolidShape(HollowFrustum{1.0, 0.5, 0.5, 0.6, 1.0}), GeometryError);
  EXPECT_THROW(SolidShape(BoxShell{{1, 1, 1}, 0.0}), GeometryError);
  // A wall thicker than the half size leaves no cavity: a solid box.
  EXPECT_TRUE(SolidShape(BoxShell{{1, 1, 1}, 0.6}).contains({0, 0, 0}));
}

TEST(Poisson, HugeRadiusGivesOnePoint) {
  const SampledPart p = poisson_sample(SolidShape(Box{{1, 1, 1}}), 10.0, 1);
  EXPECT_EQ(p.points.size(), 1u);
}

TEST(Poisson, BoxCountWithinOracleRange) {
  const SolidShape box(Box{{1, 1, 1}});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::size_t n = poisson_sample(box, 0.1, seed).points.size();
    EXPECT_GE(n, kOracleBoxMin) << "seed " << seed;
    EXPECT_LE(n, kOracleBoxMax) << "seed " << seed;
  }
}

TEST(Poisson, SpacingAndMembershipOverRandomShapes) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const SolidShape shape = random_shape(rng);
    const double r = rng.uniform(0.02, 0.05);
    const std::uint64_t seed = rng.next();
    const SampledPart p = poisson_sample(shape, r, seed, 2.0);
    ASSERT_FALSE(p.points.empty());
    EXPECT_GE(min_pair_distance(p.points), r) << "trial " << trial;
    for (const Vec3& q : p.points) ASSERT_TRUE(shape.contains(q)) << "trial " << trial;
    EXPECT_DOUBLE_EQ(p.point_mass() * static_cast<double>(p.points.size()), 2.0);
  }
}

TEST(Poisson, DeterministicForSeed) {
  const SolidShape s(Cylinder{0.1, 0.3});
  const auto a = poisson_sample(s, 0.03, 99).points;
  const auto b = poisson_sample(s, 0.03, 99).points;
  const auto c = poisson_sample(s, 0.03, 100).points;
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Poisson, NearlyMaximal) {
  // A dense probe lattice should find almost no point that still fits.
  const SolidShape box(Box{{0.5, 0.5, 0.5}});
  const double r = 0.05;
  const auto pts = poisson_sample(box, r, 5).points;
  Rng rng(6);
  int fits = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec3 q{rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25)};
    bool ok = true;
    for (const Vec3& p : pts)
      if (norm(p - q) < r) {
        ok = false;
        break;
      }
    fits += ok;
  }
  EXPECT_LT(fits, 20);
}

TEST(Connect, TwoPoints) {
  const std::vector<Vec3> pts{{0, 0, 0}, {0.3, 0.4, 0}};
  const ConnectResult r = connect_springs(pts, 0.5, 10.0, 0.1);
  ASSERT_EQ(r.springs.size(), 1u);
  EXPECT_DOUBLE_EQ(r.springs[0].rest_length, 0.5);
  EXPECT_TRUE(r.connected());
}

TEST(Connect, TooShortRadiusDisconnects) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const ConnectResult r = connect_springs(pts, 0.5, 10.0, 0.1);
  EXPECT_TRUE(r.springs.empty());
  EXPECT_EQ(r.component_count, 3u);
  EXPECT_FALSE(r.connected());
}

TEST(Connect, GridMatchesAllPairsOracle) {
  const double h = 0.01;
  const auto pts = grid3(h);
  std::vector<oracle::P3> op;
  for (const Vec3& p : pts) op.push_back({p.x, p.y, p.z});
  const std::size_t expected = oracle::pair_count(op, 1.5 * h);
  EXPECT_EQ(expected, 126u);  // frozen oracle value: 54 axial + 72 face diagonals
  const ConnectResult r = connect_springs(pts, 1.5 * h, 1.0, 0.0);
  EXPECT_EQ(r.springs.size(), expected);
  EXPECT_TRUE(r.connected());
}

TEST(Connect, SortedUniqueAndSymmetricUnderPermutation) {
  const SampledPart part = poisson_sample(SolidShape(Box{{0.2, 0.2, 0.2}}), 0.03, 8);
  const ConnectResult r = connect_springs(part, 0.054, 1.0, 0.0);
  for (std::size_t i = 0; i < r.springs.size(); ++i) {
    EXPECT_LT(r.springs[i].endpoint_a, r.springs[i].endpoint_b);
    if (i > 0) {
      EXPECT_TRUE(std::tie(r.springs[i - 1].endpoint_a, r.springs[i - 1].endpoint_b) <
                  std::tie(r.springs[i].endpoint_a, r.springs[i].endpoint_b));
    }
  }
  std::vector<Vec3> shuffled = part.points;
  Rng rng(3);
  rng.shuffle(shuffled);
  EXPECT_EQ(canonical(part.points, r), canonical(shuffled, connect_springs(shuffled, 0.054, 1.0, 0.0)));
}

TEST(Connect, ScalingScalesRestLengths) {
  const SampledPart part = poisson_sample(SolidShape(Cylinder{0.1, 0.2}), 0.03, 4);
  const ConnectResult base = connect_springs(part, 0.054, 1.0, 0.0);
  for (double c : {2.0, 0.5, 4.0}) {
    std::vector<Vec3> scaled;
    for (const Vec3& p : part.points) scaled.push_back(p * c);
    const ConnectResult r = connect_springs(scaled, 0.054 * c, 1.0, 0.0);
    ASSERT_EQ(r.springs.size(), base.springs.size());
    for (std::size_t i = 0; i < r.springs.size(); ++i) {
      EXPECT_EQ(r.springs[i].endpoint_a, base.springs[i].endpoint_a);
      EXPECT_EQ(r.springs[i].rest_length, base.springs[i].rest_length * c);
    }
  }
}
