#include "psk/bianchi.hpp"

#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psk/examples.hpp"

using namespace psk;

namespace {

constexpr double kPi = std::numbers::pi;

struct Square {
  NetPatch a, b, c;
};

// Source patch and its two mates from the two seed normals at one random q0.
Square mates_square(std::uint64_t seed) {
  TractrixParams par;
  par.k = 12;
  par.rows = 7;
  par.cols = 7;
  const NetPatch a = tractrix_net(par).window(0, 1, 5, 5);
  const double k = constant_curvature(a);
  oracle::Rng rng(seed);
  const ContactElement& p0 = a.at(0, 0);
  const Vec3 u = p0.n.unitOrthogonal(), v = p0.n.cross(u);
  const double ang = rng.uniform(0, 2 * kPi), dist = rng.uniform(0.1, 0.9) / std::sqrt(-k);
  const Vec3 q0 = p0.p + dist * (std::cos(ang) * u + std::sin(ang) * v);
  const auto ms = seed_normals(p0, q0, k);
  return {a, propagate(a, {q0, ms[0]}).net, propagate(a, {q0, ms[1]}).net};
}

// Signed twist sin(phi) / dist, phi viewed along the common perpendicular from the first line.
double oracle_twist(const Vec3& p, const Vec3& a, const Vec3& q, const Vec3& b) {
  const Vec3 w = a.cross(b);
  const Vec3 dir = w.normalized();
  const double dist = (q - p).dot(dir);
  const Vec3 ua = a.normalized(), ub = b.normalized();
  // viewed along dir, oriented by the sign of the separation
  const double s = ua.cross(ub).dot(dist >= 0 ? dir : Vec3(-dir));
  return s / std::abs(dist);
}

Motion random_motion(oracle::Rng& rng) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(rng.uniform(0, 2 * kPi), rng.unit()).toRotationMatrix();
  return Motion::from_rt(r, rng.vec(3));
}

}  // namespace

TEST(HalfTurn, CanonicalFrame) {
  const double phi = kPi / 3, z = 1, beta = 1, gamma = 1;
  const Vec3 l(std::cos(phi), std::sin(phi), 0), m(std::cos(phi), -std::sin(phi), 0);
  const ContactElement b(Vec3(0, 0, z) + beta * l, l), c(Vec3(0, 0, -z) + gamma * m, m);
  const HalfTurn h = halfturn_axis(b, c);
  EXPECT_LT(h.axis.direction().cross(Vec3::UnitX()).norm(), 1e-12);
  EXPECT_LT(h.axis.distance_to(Vec3::Zero()), 1e-12);
  EXPECT_LT(h.residual, 1e-12);
}

TEST(HalfTurn, UnequalOffsetsRejected) {
  const double phi = kPi / 3;
  const Vec3 l(std::cos(phi), std::sin(phi), 0), m(std::cos(phi), -std::sin(phi), 0);
  const ContactElement b(Vec3(0, 0, 1) + 1.0 * l, l), c(Vec3(0, 0, -1) + 2.0 * m, m);
  try {
    halfturn_axis(b, c);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_halfturn);
  }
}

TEST(HalfTurn, IdenticalElementsAmbiguous) {
  const ContactElement b(Vec3(1, 2, 3), Vec3(0, 0, 1));
  try {
    halfturn_axis(b, b);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_halfturn);
  }
}

TEST(HalfTurn, RecoversSynthesizedAxis) {
  oracle::Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    const Vec3 ap = rng.vec(2), ad = rng.unit();
    const Vec3 bp = rng.vec(2), bn = rng.unit();
    const ContactElement b(bp, bn);
    const ContactElement c(oracle::rotate_about(bp, ap, ad, kPi), oracle::rotate_about(bp + bn, ap, ad, kPi) -
                                                                      oracle::rotate_about(bp, ap, ad, kPi));
    if ((b.n + c.n).norm() < 1e-3) continue;  // normals opposite: axis not determined by the bisector
    const HalfTurn h = halfturn_axis(b, c);
    EXPECT_LT(h.axis.direction().cross(ad).norm(), 1e-9);
    EXPECT_LT(oracle::line_distance(h.axis.point(), h.axis.direction(), ap, ad), 1e-9);
    EXPECT_LT(h.residual, 1e-9);
  }
}

TEST(CompleteElement, MateConditionsOnPipeline) {
  const Square s = mates_square(3);
  for (int i = 0; i < s.a.rows; ++i)
    for (int j = 0; j < s.a.cols; ++j) {
      const ContactElement &a = s.a.at(i, j), &b = s.b.at(i, j), &c = s.c.at(i, j);
      const ContactElement d = complete_element(a, b, c);
      EXPECT_NEAR((d.p - b.p).norm(), (a.p - c.p).norm(), 1e-9);
      EXPECT_NEAR((d.p - c.p).norm(), (a.p - b.p).norm(), 1e-9);
      EXPECT_LT(std::abs(d.n.dot(d.p - b.p)), 1e-9);
      EXPECT_LT(std::abs(d.n.dot(d.p - c.p)), 1e-9);
      const double tab = oracle_twist(a.p, a.n, b.p, b.n), tcd = oracle_twist(c.p, c.n, d.p, d.n);
      const double tac = oracle_twist(a.p, a.n, c.p, c.n), tbd = oracle_twist(b.p, b.n, d.p, d.n);
      EXPECT_NEAR(tab, tcd, 1e-9 * std::abs(tab));
      EXPECT_NEAR(tac, tbd, 1e-9 * std::abs(tac));
      EXPECT_NEAR(std::abs(tab), std::abs(tac), 1e-9 * std::abs(tab));
    }
}

TEST(CompleteElement, Involution) {
  const Square s = mates_square(4);
  for (int i = 0; i < s.a.rows; ++i)
    for (int j = 0; j < s.a.cols; ++j) {
      const ContactElement d = complete_element(s.a.at(i, j), s.b.at(i, j), s.c.at(i, j));
      const ContactElement a = complete_element(d, s.b.at(i, j), s.c.at(i, j));
      EXPECT_LT((a.p - s.a.at(i, j).p).norm(), 1e-12);
      EXPECT_LT((a.n - s.a.at(i, j).n).norm(), 1e-12);
    }
}

TEST(CompleteElement, Equivariant) {
  const Square s = mates_square(5);
  oracle::Rng rng(55);
  for (int it = 0; it < 20; ++it) {
    const Motion t = random_motion(rng);
    const ContactElement &a = s.a.at(2, 3), &b = s.b.at(2, 3), &c = s.c.at(2, 3);
    const ContactElement d = complete_element(a, b, c).transformed(t);
    const ContactElement dt = complete_element(a.transformed(t), b.transformed(t), c.transformed(t));
    EXPECT_LT((d.p - dt.p).norm(), 1e-9);
    EXPECT_LT((d.n - dt.n).norm(), 1e-9);
  }
}

TEST(CompleteElement, TwistMismatch) {
  // every mate of a constant-curvature source has the same twist magnitude; c here is not a mate
  const Square s = mates_square(6);
  const ContactElement &a = s.a.at(0, 0), &b = s.b.at(0, 0);
  const ContactElement c(b.p + 0.3 * (b.p - a.p), s.c.at(0, 0).n);
  try {
    complete_element(a, b, c);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::twist_mismatch);
  }
}

// Points x on the meet of the tangent planes of b and c, with normal along (x-b) x (x-c),
// are mates of both b and c with opposite signed twists. The twist magnitude of the square
// is reached at a and at exactly one other point.
TEST(CompleteElement, UniqueAlongTangentPlaneLine) {
  for (std::uint64_t seed : {8u, 9u, 10u}) {
    const Square s = mates_square(seed);
    const ContactElement &a = s.a.at(1, 1), &b = s.b.at(1, 1), &c = s.c.at(1, 1);
    const ContactElement d = complete_element(a, b, c);
    const Vec3 dir = b.n.cross(c.n).normalized();
    Eigen::Matrix<double, 2, 3> m;
    m.row(0) = b.n.transpose();
    m.row(1) = c.n.transpose();
    const Vec3 base = m.completeOrthogonalDecomposition().solve(Eigen::Vector2d(b.n.dot(b.p), c.n.dot(c.p)));
    const double tau = std::abs(oracle_twist(a.p, a.n, b.p, b.n));
    double sum = 0.0;
    const auto h = [&](double t) {
      const Vec3 x = base + t * dir;
      const Vec3 k = (x - b.p).cross(x - c.p);
      const double tb = oracle_twist(x, k, b.p, b.n), tc = oracle_twist(x, k, c.p, c.n);
      sum = std::max(sum, std::abs(tb + tc) / std::abs(tb));
      return std::abs(tb) - tau;
    };
    const double span = 50.0 * (1.0 + (b.p - c.p).norm() + base.norm());
    const int n = 200000;
    std::vector<double> roots;
    double t0 = -span, h0 = h(t0);
    for (int k = 1; k <= n; ++k) {
      const double t1 = -span + 2 * span * k / n, h1 = h(t1);
      if (std::signbit(h0) != std::signbit(h1)) {
        double lo = t0, hi = t1, hlo = h0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * span; ++it) {
          const double mid = 0.5 * (lo + hi), hm = h(mid);
          if (std::signbit(hm) == std::signbit(hlo))
            lo = mid, hlo = hm;
          else
            hi = mid;
        }
        const double r = 0.5 * (lo + hi);
        if (std::abs(h(r)) < 1e-6) roots.push_back(r);  // sign changes through poles are skipped
      }
      t0 = t1;
      h0 = h1;
    }
    EXPECT_LT(sum, 1e-9);
    ASSERT_EQ(roots.size(), 2u) << seed;
    const double ta = (a.p - base).dot(dir), td = (d.p - base).dot(dir);
    const double r0 = std::min(roots[0], roots[1]), r1 = std::max(roots[0], roots[1]);
    EXPECT_NEAR(std::min(ta, td), r0, 1e-7);
    EXPECT_NEAR(std::max(ta, td), r1, 1e-7);
  }
}

TEST(CompleteNet, PipelinePasses) {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const Square s = mates_square(seed);
    const Completion c = complete_net(s.a, s.b, s.c);
    EXPECT_TRUE(c.report.passed()) << seed;
    EXPECT_LT(c.report.max_residual("rotation-pair"), 1e-8);
    EXPECT_LT(c.report.max_residual("principal/"), 1e-8);
    for (const auto& m : c.report.metrics) {
      if (m.name == "bennett-special") { EXPECT_EQ(m.value, 1.0); }
    }
    for (int i = 0; i < s.a.rows; ++i)
      for (int j = 0; j < s.a.cols; ++j) {
        const ContactElement &a = s.a.at(i, j), &b = s.b.at(i, j), &cc = s.c.at(i, j), &d = c.net.at(i, j);
        // opposite elements of the square swap under one half-turn each
        const HalfTurn hbc = halfturn_axis(b, cc);
        const ContactElement ha = a.transformed(hbc.motion);
        EXPECT_LT((ha.p - d.p).norm(), 1e-9);
        EXPECT_LT((ha.n - d.n).norm(), 1e-9);
        EXPECT_LT(hbc.residual, 1e-9);
      }
  }
}

TEST(CompleteNet, EqualMatesRejected) {
  const Square s = mates_square(30);
  EXPECT_THROW(complete_net(s.a, s.b, s.b), GeometryError);
}

TEST(CompleteNet, SizeMismatch) {
  const Square s = mates_square(31);
  try {
    complete_net(s.a, s.b, s.c.window(0, 0, 4, 4));
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::inconsistent_inputs);
  }
}

TEST(Bennett, PipelineFrameIsSpecial) {
  const Square s = mates_square(40);
  const ContactElement d = complete_element(s.a.at(2, 2), s.b.at(2, 2), s.c.at(2, 2));
  const Report r = bennett_check(BennettFrame::from_elements(s.a.at(2, 2), s.b.at(2, 2), s.c.at(2, 2), d));
  EXPECT_TRUE(r.passed());
  for (const auto& m : r.metrics) {
    if (m.name == "special") { EXPECT_EQ(m.value, 1.0); }
    if (m.name == "degenerate") { EXPECT_EQ(m.value, 0.0); }
  }
}

TEST(Bennett, PerturbedFootReported) {
  const Square s = mates_square(41);
  const ContactElement &a = s.a.at(2, 2), &b = s.b.at(2, 2), &c = s.c.at(2, 2);
  ContactElement d = complete_element(a, b, c);
  d.p += 1e-3 * (d.p - c.p).normalized();
  const Report r = bennett_check(BennettFrame::from_elements(a, b, c, d));
  EXPECT_FALSE(r.passed());
  EXPECT_NEAR(r.max_residual("dist-ab-cd"), 1e-3, 1e-6);
}

TEST(Bennett, PlanarRectangleDegenerate) {
  const Vec3 z = Vec3::UnitZ();
  const ContactElement a(Vec3(0, 0, 0), z), b(Vec3(1, 0, 0), z), c(Vec3(0, 2, 0), z), d(Vec3(1, 2, 0), z);
  const Report r = bennett_check(BennettFrame::from_elements(a, b, c, d));
  EXPECT_TRUE(r.passed());
  for (const auto& m : r.metrics) {
    if (m.name == "degenerate") { EXPECT_EQ(m.value, 1.0); }
    if (m.name == "special") { EXPECT_EQ(m.value, 0.0); }
    if (m.name == "twist-ab" || m.name == "twist-ac") { EXPECT_EQ(m.value, 0.0); }
  }
}
