#include "psk/examples.hpp"

#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace psk;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> quad_curvatures(const NetPatch& net) {
  std::vector<double> ks;
  for (int i = 0; i + 1 < net.rows; ++i)
    for (int j = 0; j + 1 < net.cols; ++j) ks.push_back(gaussian_curvature(ElementaryQuad::from_net(net, i, j)));
  return ks;
}

}  // namespace

TEST(AxisNet, RadialNormals) {
  TractrixParams par;
  par.k = 4;
  par.rows = 5;
  par.cols = 3;
  const NetPatch net = axis_net(par);
  EXPECT_LT((net.at(1, 0).n - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((net.at(2, 2).n - Vec3(-1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((net.at(4, 1).n - net.at(0, 1).n).norm(), 1e-15);
  for (int i = 0; i < net.rows; ++i)
    for (int j = 0; j < net.cols; ++j) {
      EXPECT_EQ(net.at(i, j).p, Vec3(0, 0, j));
      EXPECT_NEAR(net.at(i, j).n.norm(), 1.0, 1e-15);
    }
}

TEST(AxisNet, PrincipalEdges) {
  for (int k : {3, 4, 7, 12}) {
    TractrixParams par;
    par.k = k;
    par.rows = 6;
    par.cols = 4;
    const NetPatch net = axis_net(par);
    for (int i = 0; i < net.rows; ++i)
      for (int j = 0; j < net.cols; ++j) {
        if (i + 1 < net.rows) { EXPECT_TRUE(is_principal_pair(net.at(i, j), net.at(i + 1, j))); }
        if (j + 1 < net.cols) { EXPECT_TRUE(is_principal_pair(net.at(i, j), net.at(i, j + 1))); }
      }
  }
}

TEST(AxisNet, RejectsSmallK) {
  TractrixParams par;
  par.k = 2;
  EXPECT_THROW(axis_net(par), GeometryError);
  EXPECT_THROW(tractrix_net(par), GeometryError);
}

TEST(Tractrix, TangentSegmentConstant) {
  for (double d : {0.7, 1.0, 2.5}) {
    TractrixParams par;
    par.d = d;
    // for small d the meridian reaches within 1e-7 of the axis by j = 9 and the length
    // measurement itself loses digits as 1 / |tangent.y|
    if (d < 1) par.cols = 6;
    const NetPatch net = tractrix_net(par);
    double lo = 1e300, hi = 0;
    for (int j = 0; j < net.cols; ++j) {
      EXPECT_NEAR(net.at(0, j).p.x(), 0.0, 1e-14);
      const double l = tangent_segment_length(net.at(0, j));
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
    EXPECT_LT(hi - lo, 1e-9);
    EXPECT_NEAR(hi, d, 1e-9);  // q(0,0) = (0, d, 0) with horizontal tangent
  }
}

TEST(Tractrix, ColumnsRotateAboutZ) {
  TractrixParams par;
  const NetPatch net = tractrix_net(par);
  const double ang = 2 * kPi / par.k;
  for (int i = 0; i + 1 < net.rows; ++i)
    for (int j = 0; j < net.cols; ++j) {
      const Vec3 p = net.at(i, j).p, n = net.at(i, j).n;
      const Vec3 rp = oracle::rotate_about(p, Vec3::Zero(), Vec3::UnitZ(), ang);
      const Vec3 rn = oracle::rotate_about(n, Vec3::Zero(), Vec3::UnitZ(), ang);
      EXPECT_LT((net.at(i + 1, j).p - rp).norm(), 1e-9) << i << " " << j;
      EXPECT_LT((net.at(i + 1, j).n - rn).norm(), 1e-9) << i << " " << j;
    }
}

TEST(Tractrix, ConstantNegativeCurvature) {
  TractrixParams par;
  const NetPatch net = tractrix_net(par);
  const auto ks = quad_curvatures(net);
  const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
  EXPECT_LT(*hi, 0.0);
  EXPECT_LT((*hi - *lo) / std::abs(*lo), 1e-8);
}

TEST(Tractrix, PrincipalNet) {
  TractrixParams par;
  const Report r = check_principal_net(tractrix_net(par));
  EXPECT_TRUE(r.passed()) << r.failures().size();
}

TEST(Tractrix, MatesOfTheAxis) {
  TractrixParams par;
  const Propagation pr = tractrix_propagation(par);
  EXPECT_LT(pr.max_closure, 1e-9);
  EXPECT_NEAR(pr.d, par.d, 1e-12);
  EXPECT_NEAR(std::abs(pr.phi), kPi / 2, 1e-12);
}

// The quad curvature of the discrete pseudosphere does not depend on k: it equals -1/d^2
// for every resolution, so successive differences over k vanish rather than shrink.
TEST(Tractrix, CurvatureIndependentOfK) {
  for (double d : {0.7, 1.0}) {
    for (int k : {6, 12, 24, 48}) {
      TractrixParams par;
      par.k = k;
      par.d = d;
      par.rows = 4;
      par.cols = 6;
      for (double kk : quad_curvatures(tractrix_net(par))) EXPECT_NEAR(kk * d * d, -1.0, 1e-9) << k;
    }
  }
}
