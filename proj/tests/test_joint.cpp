#include "flexisim/joint.hpp"
#include "flexisim/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace flexisim;

namespace {

constexpr double kPi = std::numbers::pi;

// Two jittered blocks meeting at x = 0, joined about the x axis.
struct Pair {
  SimState state;
  PartRange a, b;
  Segment axis{{-0.05, 0, 0}, {0.05, 0, 0}};
};

Pair make_pair(std::uint64_t seed, double spring_k = 300.0) {
  Pair p;
  p.state.gravity = Vec3{};
  p.state.contact.enabled = false;
  Rng rng(seed);
  auto block = [&](double x0) {
    const auto first = static_cast<std::uint32_t>(p.state.masses.size());
    for (int i = 0; i < 4; ++i)
      for (int j = -2; j <= 2; ++j)
        for (int k = -2; k <= 2; ++k)
          p.state.add_mass({x0 + 0.01 * i + rng.uniform(-1e-3, 1e-3), 0.01 * j + rng.uniform(-1e-3, 1e-3),
                            0.01 * k + rng.uniform(-1e-3, 1e-3)},
                           0.002);
    const auto count = static_cast<std::uint32_t>(p.state.masses.size()) - first;
    for (std::uint32_t u = first; u < first + count; ++u)
      for (std::uint32_t v = u + 1; v < first + count; ++v)
        if (norm(p.state.masses[u].position - p.state.masses[v].position) < 0.018)
          p.state.add_spring(u, v, spring_k, 0.0);
    return PartRange{x0 < 0 ? "a" : "b", first, count};
  };
  p.a = block(-0.0355);
  p.b = block(0.0055);
  return p;
}

JointOptions options(int n_proxy = 8) {
  JointOptions o;
  o.selection_radius = 0.015;
  o.n_proxy = n_proxy;
  o.anchor_stiffness = 1000.0;
  o.proxy_stiffness = 1000.0;
  o.anchor_damping = 0.0;
  o.proxy_damping = 0.0;
  return o;
}

double axis_distance(const Vec3& p, const Segment& s) {
  const Vec3 u = normalized(s.end - s.start);
  const Vec3 rel = p - s.start;
  return norm(rel - u * dot(rel, u));
}

}  // namespace

TEST(CreateJoint, ExactProxyCountAllCrossSide) {
  Pair p = make_pair(1);
  // Narrow selection: restrict to a handful of vertices per side.
  JointOptions o = options(4);
  o.selection_radius = 0.012;
  const RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, o, 7);
  ASSERT_GE(j.side_a_vertices.size(), 3u);
  ASSERT_GE(j.side_b_vertices.size(), 3u);
  EXPECT_EQ(j.proxy_springs.size(), 4u);
  auto in = [](const std::vector<std::uint32_t>& v, std::uint32_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  for (std::uint32_t s : j.proxy_springs) {
    const SpringElement& e = p.state.springs[s];
    EXPECT_TRUE(in(j.side_a_vertices, e.endpoint_a));
    EXPECT_TRUE(in(j.side_b_vertices, e.endpoint_b));
  }
  for (std::uint32_t v : j.side_a_vertices) EXPECT_FALSE(in(j.side_b_vertices, v));
}

TEST(CreateJoint, TwoAnchorSpringsPerSelectedVertex) {
  Pair p = make_pair(2);
  const std::size_t springs_before = p.state.springs.size();
  const RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(), 3);
  const std::size_t selected = j.side_a_vertices.size() + j.side_b_vertices.size();
  EXPECT_EQ(j.anchor_springs.size(), 2 * selected);
  EXPECT_EQ(p.state.springs.size(), springs_before + 2 * selected + 8);
  std::vector<int> per_vertex(p.state.masses.size(), 0);
  for (std::uint32_t s : j.anchor_springs) {
    const SpringElement& e = p.state.springs[s];
    EXPECT_TRUE(e.endpoint_b == j.axis_anchor_a || e.endpoint_b == j.axis_anchor_b);
    ++per_vertex[e.endpoint_a];
  }
  for (std::uint32_t v : j.side_a_vertices) EXPECT_EQ(per_vertex[v], 2);
  for (std::uint32_t v : j.side_b_vertices) EXPECT_EQ(per_vertex[v], 2);
  EXPECT_EQ(p.state.masses[j.axis_anchor_a].position, p.axis.start);
  EXPECT_EQ(p.state.masses[j.axis_anchor_b].position, p.axis.end);
}

TEST(CreateJoint, SeedFixesPairing) {
  Pair p1 = make_pair(4), p2 = make_pair(4), p3 = make_pair(4);
  const RevoluteJoint a = create_joint(p1.state, p1.a, p1.b, p1.axis, options(12), 5);
  const RevoluteJoint b = create_joint(p2.state, p2.a, p2.b, p2.axis, options(12), 5);
  const RevoluteJoint c = create_joint(p3.state, p3.a, p3.b, p3.axis, options(12), 6);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pa, pb, pc;
  for (std::uint32_t s : a.proxy_springs) pa.emplace_back(p1.state.springs[s].endpoint_a, p1.state.springs[s].endpoint_b);
  for (std::uint32_t s : b.proxy_springs) pb.emplace_back(p2.state.springs[s].endpoint_a, p2.state.springs[s].endpoint_b);
  for (std::uint32_t s : c.proxy_springs) pc.emplace_back(p3.state.springs[s].endpoint_a, p3.state.springs[s].endpoint_b);
  EXPECT_EQ(pa, pb);
  EXPECT_NE(pa, pc);
}

TEST(CreateJoint, TooFewVerticesNamesPart) {
  Pair p = make_pair(5);
  JointOptions o = options();
  o.selection_radius = 1e-4;
  try {
    create_joint(p.state, p.a, p.b, p.axis, o, 1);
    FAIL() << "expected a JointError";
  } catch (const JointError& e) {
    EXPECT_NE(std::string(e.what()).find("part 'a'"), std::string::npos) << e.what();
  }
}

TEST(RotateJoint, ZeroDeltaIsIdentity) {
  Pair p = make_pair(6);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(), 1);
  rotate_joint(p.state, j, 0.05);
  const SimState before = p.state;
  rotate_joint(p.state, j, 0.0);
  for (std::size_t i = 0; i < before.masses.size(); ++i)
    EXPECT_EQ(before.masses[i].position, p.state.masses[i].position);
  for (std::uint32_t s : j.proxy_springs)
    EXPECT_EQ(before.springs[s].rest_length, p.state.springs[s].rest_length);
}

TEST(RotateJoint, CapEnforced) {
  Pair p = make_pair(7);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(), 1);
  EXPECT_NO_THROW(rotate_joint(p.state, j, kPi / 8));
  EXPECT_NO_THROW(rotate_joint(p.state, j, -kPi / 8));
  EXPECT_THROW(rotate_joint(p.state, j, std::nextafter(kPi / 8, 1.0)), JointError);
  EXPECT_THROW(rotate_joint(p.state, j, NAN), JointError);
}

TEST(RotateJoint, AxisDistancePreserved) {
  Pair p = make_pair(8);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(), 1);
  Rng rng(9);
  for (int call = 0; call < 200; ++call) {
    std::vector<double> before;
    for (const MassPoint& m : p.state.masses) before.push_back(axis_distance(m.position, p.axis));
    rotate_joint(p.state, j, rng.uniform(-kPi / 8, kPi / 8));
    for (std::uint32_t v : j.side_a_vertices)
      ASSERT_NEAR(axis_distance(p.state.masses[v].position, p.axis), before[v], 1e-12);
    for (std::uint32_t v : j.side_b_vertices)
      ASSERT_NEAR(axis_distance(p.state.masses[v].position, p.axis), before[v], 1e-12);
  }
}

TEST(RotateJoint, OneSidedFullTurnReturns) {
  Pair p = make_pair(10);
  JointOptions o = options();
  o.side_a_share = 0.0;
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, o, 1);
  const SimState start = p.state;
  for (int k = 0; k < 16; ++k) rotate_joint(p.state, j, 2 * kPi / 16);
  for (std::size_t i = 0; i < start.masses.size(); ++i)
    EXPECT_LT(norm(p.state.masses[i].position - start.masses[i].position), 1e-9);
  EXPECT_NEAR(j.unwrapped_angle, 2 * kPi, 1e-12);
}

TEST(RotateJoint, SplitFullTurnClosesRelativeConfiguration) {
  // Each side turns by pi in opposite senses: both end at R(pi) p, so the
  // assembly is rigidly half-turned and its relative configuration closes.
  Pair p = make_pair(11);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(), 1);
  const SimState start = p.state;
  for (int k = 0; k < 16; ++k) rotate_joint(p.state, j, 2 * kPi / 16);
  const Mat3 back = Mat3::rotation({1, 0, 0}, -kPi);
  for (const auto* side : {&j.side_a_vertices, &j.side_b_vertices})
    for (std::uint32_t v : *side)
      EXPECT_LT(norm(back * p.state.masses[v].position - start.masses[v].position), 1e-9);
}

TEST(RotateJoint, OppositeSensesAddUpToDelta) {
  Pair p = make_pair(12);
  JointOptions o = options();
  o.side_a_share = 0.3;
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, o, 1);
  const Vec3 a0 = p.state.masses[j.side_a_vertices[0]].position;
  const Vec3 b0 = p.state.masses[j.side_b_vertices[0]].position;
  rotate_joint(p.state, j, 0.2);
  auto angle_about_x = [](const Vec3& from, const Vec3& to) {
    return std::atan2(from.y * to.z - from.z * to.y, from.y * to.y + from.z * to.z);
  };
  const double da = angle_about_x(a0, p.state.masses[j.side_a_vertices[0]].position);
  const double db = angle_about_x(b0, p.state.masses[j.side_b_vertices[0]].position);
  EXPECT_NEAR(da, 0.06, 1e-12);
  EXPECT_NEAR(db, -0.14, 1e-12);
  EXPECT_NEAR(da - db, 0.2, 1e-12);
}

TEST(RotateJoint, ProxiesExactlyRelaxedAfterReset) {
  Pair p = make_pair(13);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(16), 1);
  Stepper st(1);
  Rng rng(14);
  std::vector<Vec3> f(p.state.springs.size());
  for (int round = 0; round < 20; ++round) {
    for (int i = 0; i < 5; ++i) st.step(p.state);
    rotate_joint(p.state, j, rng.uniform(-0.3, 0.3));
    for (MassPoint& m : p.state.masses) m.velocity = Vec3{};
    compute_spring_forces(p.state, f);
    for (std::uint32_t s : j.proxy_springs) ASSERT_EQ(f[s], Vec3{}) << "round " << round;
  }
}

TEST(RotateJoint, ProxyEnergyGrowsWithTwist) {
  Pair p = make_pair(15);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(16), 1);
  rotate_joint(p.state, j, 0.0);
  const SimState relaxed = p.state;
  auto proxy_energy = [&](const SimState& s) {
    double e = 0.0;
    for (std::uint32_t k : j.proxy_springs) {
      const SpringElement& sp = s.springs[k];
      const double d = norm(s.masses[sp.endpoint_b].position - s.masses[sp.endpoint_a].position) - sp.rest_length;
      e += 0.5 * sp.stiffness * d * d;
    }
    return e;
  };
  // Twist side B rigidly without resetting the proxies.
  double prev = 0.0;
  for (int k = 1; k <= 8; ++k) {
    SimState s = relaxed;
    const Mat3 r = Mat3::rotation({1, 0, 0}, k * kPi / 64);
    for (std::uint32_t v : j.side_b_vertices) s.masses[v].position = r * s.masses[v].position;
    const double e = proxy_energy(s);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(RotateJoint, FloatingAssemblyAngularMomentumBounded) {
  // A kinematic turn rotates positions and velocities about the current
  // anchor line, so it keeps the axial angular momentum about that line.
  // Between turns all forces are internal and central, so each step keeps the
  // angular momentum about any fixed line.
  Pair p = make_pair(16);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(16), 1);
  Stepper st(1);
  auto activity = [&](const Vec3& c, const Vec3& u) {
    double a = 0.0;
    for (const MassPoint& m : p.state.masses) a += m.mass * std::abs(dot(u, cross(m.position - c, m.velocity)));
    return a;
  };
  const Vec3 fixed_point{0.01, 0.02, -0.03};
  const Vec3 fixed_dir = normalized(Vec3{1, 0.3, -0.2});
  for (int i = 0; i < 1000; ++i) {
    if (i % 20 == 0) {
      const Vec3 c = p.state.masses[j.axis_anchor_a].position;
      const Vec3 u = normalized(p.state.masses[j.axis_anchor_b].position - c);
      const double before = axial_angular_momentum(p.state, c, u);
      rotate_joint(p.state, j, 0.01);
      const double scale = activity(c, u) + 1e-30;
      ASSERT_LT(std::abs(axial_angular_momentum(p.state, c, u) - before), 1e-12 * scale) << "turn " << i;
    }
    const double before = axial_angular_momentum(p.state, fixed_point, fixed_dir);
    st.step(p.state);
    const double scale = activity(fixed_point, fixed_dir) + 1e-30;
    ASSERT_LT(std::abs(axial_angular_momentum(p.state, fixed_point, fixed_dir) - before), 1e-12 * scale)
        << "step " << i;
  }
}

TEST(Encoder, AngleAndRate) {
  Pair p = make_pair(18);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(), 1);
  rotate_joint(p.state, j, 0.1);
  EXPECT_DOUBLE_EQ(joint_measured_state(j, p.state).angle, 0.1);
  for (int i = 0; i < 9; ++i) rotate_joint(p.state, j, 0.1);
  EXPECT_NEAR(joint_measured_state(j, p.state).angle, 1.0, 1e-15);

  latch_encoder(j, p.state);
  rotate_joint(p.state, j, 0.1);
  p.state.step_count += 200;  // 0.01 s at the default dt
  EXPECT_NEAR(joint_measured_state(j, p.state).rate, 10.0, 1e-9);
}

TEST(Encoder, AngleWrapsButUnwrappedAccumulates) {
  Pair p = make_pair(19);
  RevoluteJoint j = create_joint(p.state, p.a, p.b, p.axis, options(), 1);
  for (int k = 0; k < 40; ++k) rotate_joint(p.state, j, -kPi / 8);
  EXPECT_NEAR(j.unwrapped_angle, -5 * kPi, 1e-12);
  EXPECT_GE(j.angle, 0.0);
  EXPECT_LT(j.angle, 2 * kPi);
  EXPECT_NEAR(j.angle, kPi, 1e-9);
}
