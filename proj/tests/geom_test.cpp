#include "psk/geom.hpp"

#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace psk;

namespace {

double incidence_residual(const HPlane& u, const HPoint& x) {
  return std::abs(u.c.dot(x.c)) / (u.c.norm() * x.c.norm());
}

}  // namespace

TEST(BisectorPlane, SymmetricPair) {
  const HPlane b = bisector_plane(HPoint::finite({1, 0, 0}), HPoint::finite({-1, 0, 0}));
  EXPECT_TRUE(b.equals(HPlane(0, {1, 0, 0})));
}

TEST(BisectorPlane, MidpointAndOrthogonality) {
  const HPlane b = bisector_plane(HPoint::finite({0, 0, 0}), HPoint::finite({2, 0, 0}));
  EXPECT_TRUE(b.equals(HPlane(-1, {1, 0, 0})));
}

TEST(BisectorPlane, ScaleInvariant) {
  const HPlane b = bisector_plane(HPoint(2, {2, 0, 0}), HPoint(1, {-1, 0, 0}));
  EXPECT_TRUE(b.equals(HPlane(0, {1, 0, 0})));
}

TEST(BisectorPlane, RejectsDegenerate) {
  EXPECT_THROW(bisector_plane(HPoint::finite({1, 2, 3}), HPoint(2, {2, 4, 6})), GeometryError);
  EXPECT_THROW(bisector_plane(HPoint::ideal({1, 0, 0}), HPoint::finite({1, 0, 0})), GeometryError);
}

TEST(BisectorPlane, MatchesGeometricDefinition) {
  oracle::Rng rng(11);
  for (int it = 0; it < oracle::kIterations; ++it) {
    const Vec3 x = rng.vec(3), y = rng.vec(3);
    const double sx = rng.uniform(0.1, 5), sy = rng.uniform(-5, -0.1);
    const HPlane b = bisector_plane(HPoint(sx, sx * x), HPoint(sy, sy * y));
    // midpoint incidence and normal parallel to y - x
    EXPECT_LT(std::abs(b.signed_distance(0.5 * (x + y))), 1e-10 * (1 + x.norm() + y.norm()));
    EXPECT_LT(b.vec().normalized().cross((y - x).normalized()).norm(), 1e-10);
    // reflection swaps the two points
    const HPoint rx = reflection_matrix(b)(HPoint::finite(x));
    EXPECT_TRUE(rx.equals(HPoint::finite(y), Tolerances{1e-9}));
  }
}

TEST(MeetPlaneLine, Basic) {
  const HPoint x = meet_plane_line(HPlane(-1, {0, 0, 1}), PlueckerLine({0, 0, 1}, Vec3::Zero()));
  EXPECT_TRUE(x.equals(HPoint::finite({0, 0, 1})));
}

TEST(MeetPlaneLine, AgainstParametricOracle) {
  const PlueckerLine l = PlueckerLine::through({1, 0, 0}, {-1, 1, 0});
  const HPoint x = meet_plane_line(HPlane(0, {1, 0, 0}), l, true);
  const Vec3 o = oracle::line_plane({1, 0, 0}, {-1, 1, 0}, {1, 0, 0}, 0.0);
  EXPECT_LT((x.affine() - o).norm(), 1e-12);
  EXPECT_LT((o - Vec3(0, 1, 0)).norm(), 1e-12);
}

TEST(MeetPlaneLine, ParallelCase) {
  const PlueckerLine l = PlueckerLine::through({0, 0, 1}, {1, 0, 0});
  const HPoint x = meet_plane_line(HPlane(0, {0, 0, 1}), l);
  EXPECT_TRUE(x.is_ideal());
  EXPECT_TRUE(x.equals(HPoint::ideal({1, 0, 0})));
  EXPECT_THROW(meet_plane_line(HPlane(0, {0, 0, 1}), l, true), GeometryError);
}

TEST(MeetPlaneLine, IncidenceProperty) {
  oracle::Rng rng(12);
  for (int it = 0; it < oracle::kIterations; ++it) {
    const HPlane u(rng.normal(), rng.vec());
    const Vec3 p = rng.vec(2), g = rng.vec();
    const PlueckerLine l = PlueckerLine::through(p, g);
    const HPoint x = meet_plane_line(u, l);
    EXPECT_LT(incidence_residual(u, x), 1e-12);
    EXPECT_LT(l.distance_to(x.affine()), 1e-9 * (1 + x.affine().norm()));
  }
}

TEST(Reflection, Diagonal) {
  const Motion m = reflection_matrix(HPlane(0, {1, 0, 0}));
  Eigen::Matrix4d d = Eigen::Vector4d(1, -1, 1, 1).asDiagonal();
  EXPECT_LT((m.m - d).norm(), 1e-15);
}

TEST(Reflection, AffineOracle) {
  const HPoint y = reflection_matrix(HPlane(-1, {1, 0, 0}))(HPoint::finite(Vec3::Zero()));
  EXPECT_LT((y.affine() - oracle::reflect_point(Vec3::Zero(), {1, 0, 0}, 1.0)).norm(), 1e-15);
  EXPECT_LT((y.affine() - Vec3(2, 0, 0)).norm(), 1e-15);
}

TEST(Reflection, InvolutionProperty) {
  oracle::Rng rng(13);
  for (int it = 0; it < oracle::kIterations; ++it) {
    const HPlane u(rng.normal(), rng.vec());
    const Motion m = reflection_matrix(u);
    const HPoint x(Vec4(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
    EXPECT_TRUE(m(m(x)).equals(x, Tolerances{1e-12}));
    EXPECT_LT(std::abs(m.linear().determinant() + 1.0), 1e-12);
  }
}

TEST(RotationFromReflections, SamePlaneIsIdentity) {
  const HPlane b(0.3, {1, 2, 3});
  EXPECT_TRUE(rotation_from_two_reflections(b, b).equals(Motion::identity()));
}

TEST(RotationFromReflections, QuarterTurn) {
  // Reflect in x = 0 first, then in y = x: a quarter turn about the z-axis,
  // clockwise seen from +z because beta is applied first.
  const Motion r = rotation_from_two_reflections(HPlane(0, {1, 0, 0}), HPlane(0, Vec3(1, -1, 0)));
  const Vec3 img = r.apply_point({1, 0, 0});
  const Vec3 o = oracle::reflect_point(oracle::reflect_point({1, 0, 0}, {1, 0, 0}, 0.0), {1, -1, 0}, 0.0);
  EXPECT_LT((img - o).norm(), 1e-14);
  EXPECT_LT((img - oracle::rotate_about({1, 0, 0}, Vec3::Zero(), {0, 0, 1}, -std::numbers::pi / 2)).norm(), 1e-14);
  // swapping the planes gives the opposite turn
  const Motion s = rotation_from_two_reflections(HPlane(0, Vec3(1, -1, 0)), HPlane(0, {1, 0, 0}));
  EXPECT_LT((s.apply_point({1, 0, 0}) - Vec3(0, 1, 0)).norm(), 1e-14);
}

TEST(RotationFromReflections, FixesIntersectionLine) {
  oracle::Rng rng(14);
  for (int it = 0; it < oracle::kIterations; ++it) {
    const HPlane b(rng.normal(), rng.vec()), g(rng.normal(), rng.vec());
    const Motion r = rotation_from_two_reflections(b, g);
    EXPECT_TRUE(r.is_direct());
    const PlueckerLine l = meet_planes(b, g);
    for (double s : {-2.0, 0.0, 3.0}) {
      const Vec3 x = l.point() + s * l.direction();
      EXPECT_LT((r.apply_point(x) - x).norm(), 1e-9 * (1 + x.norm()));
    }
  }
}

TEST(RotationFromReflections, ParallelPlanesRejected) {
  EXPECT_THROW(rotation_from_two_reflections(HPlane(0, {0, 0, 1}), HPlane(-1, {0, 0, 1})), GeometryError);
}

TEST(Twist, CanonicalFrame) {
  const double t = 1.0, e = 0.5;
  const PlueckerLine n = PlueckerLine::through({0, 0, e}, Vec3(1, t, 0));
  const PlueckerLine m = PlueckerLine::through({0, 0, -e}, Vec3(1, -t, 0));
  const TwistResult r = twist(n, m);
  EXPECT_NEAR(r.distance, 1.0, 1e-15);
  EXPECT_NEAR(r.angle, std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(r.value, 1.0, 1e-15);
  EXPECT_FALSE(r.parallel);
}

TEST(Twist, ParallelLines) {
  const TwistResult r = twist(PlueckerLine::through(Vec3::Zero(), {0, 0, 1}),
                              PlueckerLine::through({1, 0, 0}, {0, 0, 2}));
  EXPECT_TRUE(r.parallel);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_NEAR(r.distance, 1.0, 1e-15);
}

TEST(Twist, IntersectingRejected) {
  EXPECT_THROW(twist(PlueckerLine::through(Vec3::Zero(), {1, 0, 0}), PlueckerLine::through(Vec3::Zero(), {0, 1, 0})),
               GeometryError);
}

TEST(Twist, DistanceMatchesOracleAndSwapSymmetry) {
  oracle::Rng rng(15);
  for (int it = 0; it < oracle::kIterations; ++it) {
    const Vec3 p = rng.vec(), a = rng.vec(), q = rng.vec(), b = rng.vec();
    const TwistResult r = twist(PlueckerLine::through(p, a), PlueckerLine::through(q, b));
    const TwistResult s = twist(PlueckerLine::through(q, b), PlueckerLine::through(p, a));
    EXPECT_NEAR(r.distance, oracle::line_distance(p, a, q, b), 1e-9);
    EXPECT_NEAR(std::abs(r.value), std::abs(s.value), 1e-9 * std::abs(r.value));
  }
}

TEST(Twist, InvariantUnderDirectIsometry) {
  oracle::Rng rng(16);
  for (int it = 0; it < oracle::kIterations; ++it) {
    const PlueckerLine n = PlueckerLine::through(rng.vec(), rng.vec());
    const PlueckerLine m = PlueckerLine::through(rng.vec(), rng.vec());
    const Motion t = Motion::rotation(PlueckerLine::through(rng.vec(), rng.vec()), rng.uniform(-3, 3)) *
                     Motion::translation(rng.vec());
    const double before = twist(n, m).value, after = twist(t(n), t(m)).value;
    EXPECT_NEAR(before, after, 1e-9 * std::max(1.0, std::abs(before)));
  }
}

TEST(Pluecker, ConditionPreservedByMotions) {
  oracle::Rng rng(17);
  for (int it = 0; it < oracle::kIterations; ++it) {
    const PlueckerLine l = PlueckerLine::through(rng.vec(3), rng.vec());
    const Motion t = rotation_from_two_reflections(HPlane(rng.normal(), rng.vec()), HPlane(rng.normal(), rng.vec()));
    const PlueckerLine k = t(l);
    EXPECT_LT(std::abs(k.g.dot(k.h)) / (k.g.norm() * (1 + k.h.norm())), 1e-12);
  }
}

TEST(LineMeetPoint, Examples) {
  EXPECT_TRUE(line_meet_point(PlueckerLine({1, 0, 0}, Vec3::Zero()), PlueckerLine({0, 1, 0}, Vec3::Zero()))
                  .equals(HPoint::finite(Vec3::Zero())));
  EXPECT_TRUE(line_meet_point(PlueckerLine({0, 0, 1}, Vec3::Zero()), PlueckerLine::through({0, 0, 3}, {1, 0, 0}))
                  .equals(HPoint::finite({0, 0, 3})));
  try {
    line_meet_point(PlueckerLine({0, 0, 1}, Vec3::Zero()), PlueckerLine::through({0, 1, 0}, {1, 0, 0}));
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::skew_lines);
  }
  EXPECT_THROW(line_meet_point(PlueckerLine({0, 0, 1}, Vec3::Zero()), PlueckerLine::through({1, 0, 0}, {0, 0, 1})),
               GeometryError);
}

TEST(JoinLinePoint, ContainsBoth) {
  oracle::Rng rng(18);
  for (int it = 0; it < 100; ++it) {
    const Vec3 p = rng.vec(), g = rng.vec(), x = rng.vec();
    const HPlane u = join_line_point(PlueckerLine::through(p, g), HPoint::finite(x));
    EXPECT_LT(incidence_residual(u, HPoint::finite(x)), 1e-12);
    EXPECT_LT(incidence_residual(u, HPoint::finite(p + 2 * g)), 1e-12);
    const HPlane v = join_line_point(PlueckerLine::through(p, g), HPoint::ideal(x));
    EXPECT_LT(std::abs(v.vec().normalized().dot(x.normalized())), 1e-12);
  }
}
