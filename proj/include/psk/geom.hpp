#pragma once

#include <optional>

#include "psk/core.hpp"

namespace psk {

// Homogeneous point [x0, x]. x0 == 0 is an ideal point (a direction).
struct HPoint {
  Vec4 c;

  HPoint() : c(1, 0, 0, 0) {}
  explicit HPoint(const Vec4& v) : c(v) {}
  HPoint(double x0, const Vec3& x) { c << x0, x; }

  static HPoint finite(const Vec3& x) { return {1.0, x}; }
  static HPoint ideal(const Vec3& dir) { return {0.0, dir}; }

  double x0() const { return c[0]; }
  Vec3 vec() const { return c.tail<3>(); }

  bool is_ideal(const Tolerances& tol = {}) const {
    return std::abs(c[0]) <= tol.rel * c.norm();
  }

  Vec3 affine() const {
    if (c[0] == 0.0) throw GeometryError(ErrorCode::parallel_case, "ideal point has no affine image");
    return c.tail<3>() / c[0];
  }

  bool equals(const HPoint& o, const Tolerances& tol = {}) const {
    return projective_distance(c, o.c) <= tol.rel;
  }
};

// Homogeneous plane [u0, u]; incidence u0*x0 + u.x = 0.
struct HPlane {
  Vec4 c;

  HPlane() : c(0, 0, 0, 1) {}
  explicit HPlane(const Vec4& v) : c(v) {}
  HPlane(double u0, const Vec3& u) { c << u0, u; }

  // Plane through point p with normal n.
  static HPlane through(const Vec3& p, const Vec3& n) { return {-n.dot(p), n}; }

  double u0() const { return c[0]; }
  Vec3 vec() const { return c.tail<3>(); }

  double incidence(const HPoint& x) const { return c.dot(x.c); }

  // Signed distance of a finite point, positive on the side u points to.
  double signed_distance(const Vec3& p) const {
    return (c[0] + vec().dot(p)) / vec().norm();
  }

  bool equals(const HPlane& o, const Tolerances& tol = {}) const {
    return projective_distance(c, o.c) <= tol.rel;
  }
};

// Oriented line: direction g, moment h = p x g.
struct PlueckerLine {
  Vec3 g = Vec3::UnitZ();
  Vec3 h = Vec3::Zero();

  PlueckerLine() = default;
  PlueckerLine(const Vec3& dir, const Vec3& moment) : g(dir), h(moment) {}

  static PlueckerLine through(const Vec3& p, const Vec3& dir) { return {dir, p.cross(dir)}; }

  // Foot of the perpendicular from the origin.
  Vec3 point() const { return g.cross(h) / g.squaredNorm(); }
  Vec3 direction() const { return g.normalized(); }
  PlueckerLine reversed() const { return {-g, -h}; }

  double pluecker_residual() const { return std::abs(g.dot(h)) / (g.norm() * std::max(h.norm(), 1e-300)); }

  // Reciprocal product; zero iff the lines are coplanar.
  double reciprocal(const PlueckerLine& o) const { return g.dot(o.h) + o.g.dot(h); }

  double distance_to(const Vec3& x) const { return (x - point()).cross(direction()).norm(); }

  bool contains(const Vec3& x, const Tolerances& tol = {}) const {
    return tol.near_zero(distance_to(x), 1.0 + x.norm());
  }

  // Same line with the same orientation.
  bool equals(const PlueckerLine& o, const Tolerances& tol = {}) const {
    Eigen::Matrix<double, 6, 1> a, b;
    a << g, h;
    b << o.g, o.h;
    const double s = std::max(1.0, std::max(h.norm() / g.norm(), o.h.norm() / o.g.norm()));
    return (a / g.norm() - b / o.g.norm()).norm() <= tol.rel * s;
  }
};

// Homogeneous 4x4 matrix on column vectors [x0, x].
struct Motion {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

  Motion() = default;
  explicit Motion(const Eigen::Matrix4d& mat) : m(mat) {}

  static Motion identity() { return {}; }

  static Motion from_rt(const Eigen::Matrix3d& r, const Vec3& t) {
    Eigen::Matrix4d mat = Eigen::Matrix4d::Zero();
    mat(0, 0) = 1.0;
    mat.block<3, 1>(1, 0) = t;
    mat.block<3, 3>(1, 1) = r;
    return Motion(mat);
  }

  // Rotation by `angle` about an oriented line (right-hand rule).
  static Motion rotation(const PlueckerLine& axis, double angle) {
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis.direction()).toRotationMatrix();
    const Vec3 c = axis.point();
    return from_rt(r, c - r * c);
  }

  static Motion translation(const Vec3& t) { return from_rt(Eigen::Matrix3d::Identity(), t); }

  Eigen::Matrix3d linear() const { return m.block<3, 3>(1, 1) / m(0, 0); }
  Vec3 translation_part() const { return m.block<3, 1>(1, 0) / m(0, 0); }

  HPoint operator()(const HPoint& x) const { return HPoint(Vec4(m * x.c)); }
  Vec3 apply_point(const Vec3& x) const { return (*this)(HPoint::finite(x)).affine(); }
  Vec3 apply_vector(const Vec3& v) const { return linear() * v; }

  PlueckerLine operator()(const PlueckerLine& l) const {
    const Vec3 p = apply_point(l.point());
    const Vec3 g = apply_vector(l.g);
    return PlueckerLine::through(p, g);
  }

  Motion operator*(const Motion& o) const { return Motion(Eigen::Matrix4d(m * o.m)); }

  Motion inverse() const { return Motion(Eigen::Matrix4d(m.inverse())); }

  bool is_direct(const Tolerances& tol = {}) const {
    const Eigen::Matrix3d r = linear();
    const double orth = (r.transpose() * r - Eigen::Matrix3d::Identity()).norm();
    return orth <= tol.rel * 10 && r.determinant() > 0;
  }

  bool equals(const Motion& o, const Tolerances& tol = {}) const {
    Eigen::Matrix<double, 16, 1> a = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(m.data());
    Eigen::Matrix<double, 16, 1> b = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(o.m.data());
    return projective_distance(a, b) <= tol.rel;
  }
};

// Bisector plane of two finite points. The direction part is
// 2 x0 y0 (x0 y - y0 x); see the ledger for the printed variant.
inline HPlane bisector_plane(const HPoint& x, const HPoint& y, const Tolerances& tol = {}) {
  if (x.is_ideal(tol) || y.is_ideal(tol))
    throw GeometryError(ErrorCode::degenerate_input, "bisector of an ideal point");
  if (x.equals(y, tol)) throw GeometryError(ErrorCode::degenerate_input, "bisector of coincident points");
  const double x0 = x.x0(), y0 = y.x0();
  const Vec3 xv = x.vec(), yv = y.vec();
  const double u0 = y0 * y0 * xv.dot(xv) - x0 * x0 * yv.dot(yv);
  const Vec3 u = 2.0 * x0 * y0 * (x0 * yv - y0 * xv);
  return {u0, u};
}

// Intersection of a plane and a line. The result may be ideal; pass
// require_finite to turn that into an error.
inline HPoint meet_plane_line(const HPlane& u, const PlueckerLine& l, bool require_finite = false,
                              const Tolerances& tol = {}) {
  const Vec3 uv = u.vec();
  HPoint x(uv.dot(l.g), -u.u0() * l.g + uv.cross(l.h));
  const double scale = uv.norm() * l.g.norm() * (1.0 + l.h.norm() / l.g.norm() + std::abs(u.u0()) / uv.norm());
  if (x.c.norm() <= tol.abs * scale)
    throw GeometryError(ErrorCode::degenerate_input, "line lies in plane");
  if (require_finite && std::abs(x.x0()) <= tol.rel * x.c.norm())
    throw GeometryError(ErrorCode::parallel_case, "line parallel to plane");
  return x;
}

inline Motion reflection_matrix(const HPlane& u, const Tolerances& tol = {}) {
  const Vec3 v = u.vec();
  const double n2 = v.squaredNorm();
  if (std::sqrt(n2) <= tol.abs * u.c.norm() || n2 == 0.0)
    throw GeometryError(ErrorCode::degenerate_input, "plane at infinity");
  Eigen::Matrix4d mat = Eigen::Matrix4d::Zero();
  mat(0, 0) = n2;
  mat.block<3, 1>(1, 0) = -2.0 * u.u0() * v;
  mat.block<3, 3>(1, 1) = n2 * Eigen::Matrix3d::Identity() - 2.0 * v * v.transpose();
  return Motion(mat);
}

// C * B: reflect in beta first, then in gamma.
inline Motion rotation_from_two_reflections(const HPlane& beta, const HPlane& gamma, const Tolerances& tol = {}) {
  const Vec3 b = beta.vec().normalized(), g = gamma.vec().normalized();
  if (b.cross(g).norm() <= tol.rel) {
    const bool same = beta.equals(gamma, tol) ||
                      projective_distance(Vec4(beta.c / beta.vec().norm()), Vec4(gamma.c / gamma.vec().norm())) <= tol.rel;
    if (!same) throw GeometryError(ErrorCode::parallel_planes);
  }
  return reflection_matrix(gamma, tol) * reflection_matrix(beta, tol);
}

struct TwistResult {
  double value = 0.0;     // sin(phi) / d
  double distance = 0.0;  // common perpendicular length d
  double angle = 0.0;     // signed phi
  bool parallel = false;
  Vec3 foot_n = Vec3::Zero();  // feet of the common perpendicular
  Vec3 foot_m = Vec3::Zero();
};

struct CommonPerpendicular {
  Vec3 foot_n, foot_m;
  bool parallel;
};

inline CommonPerpendicular common_perpendicular(const PlueckerLine& n, const PlueckerLine& m,
                                                const Tolerances& tol = {}) {
  const Vec3 a = n.direction(), b = m.direction();
  const Vec3 pn = n.point(), pm = m.point();
  const Vec3 w = a.cross(b);
  if (w.norm() <= tol.rel) {
    // parallel: perpendicular through pn
    const Vec3 fm = pm + b * b.dot(pn - pm);
    return {pn, fm, true};
  }
  // Solve pn + s a + (fm - fn) = pm + r b with fm - fn parallel to w.
  const Vec3 d = pm - pn;
  const double ww = w.squaredNorm();
  const double s = d.cross(b).dot(w) / ww;
  const double r = d.cross(a).dot(w) / ww;
  return {pn + s * a, pm + r * b, false};
}

// Twist of two oriented lines, counter-clockwise convention viewed along
// the ray from the foot on N to the foot on M.
inline TwistResult twist(const PlueckerLine& n, const PlueckerLine& m, const Tolerances& tol = {}) {
  const auto cp = common_perpendicular(n, m, tol);
  TwistResult r;
  r.foot_n = cp.foot_n;
  r.foot_m = cp.foot_m;
  r.distance = (cp.foot_m - cp.foot_n).norm();
  const double scale = 1.0 + std::max(cp.foot_n.norm(), cp.foot_m.norm());
  if (cp.parallel) {
    r.parallel = true;
    if (tol.near_zero(r.distance, scale)) throw GeometryError(ErrorCode::intersecting_lines, "coincident lines");
    return r;
  }
  if (tol.near_zero(r.distance, scale)) throw GeometryError(ErrorCode::intersecting_lines);
  const Vec3 ray = (cp.foot_m - cp.foot_n) / r.distance;
  r.angle = signed_angle(n.direction(), m.direction(), ray);
  r.value = std::sin(r.angle) / r.distance;
  return r;
}

inline HPoint line_meet_point(const PlueckerLine& n, const PlueckerLine& m, const Tolerances& tol = {}) {
  const auto cp = common_perpendicular(n, m, tol);
  if (cp.parallel) throw GeometryError(ErrorCode::parallel_lines);
  const double d = (cp.foot_m - cp.foot_n).norm();
  if (!tol.near_zero(d, 1.0 + cp.foot_n.norm())) throw GeometryError(ErrorCode::skew_lines);
  return HPoint::finite(0.5 * (cp.foot_n + cp.foot_m));
}

// Plane spanned by a line and a homogeneous point not on it.
inline HPlane join_line_point(const PlueckerLine& l, const HPoint& x) {
  return {-x.vec().dot(l.h), l.g.cross(x.vec()) + x.x0() * l.h};
}

// Line of two non-parallel planes, oriented along u x v.
inline PlueckerLine meet_planes(const HPlane& u, const HPlane& v, const Tolerances& tol = {}) {
  const Vec3 g = u.vec().cross(v.vec());
  if (g.norm() <= tol.rel * u.vec().norm() * v.vec().norm()) throw GeometryError(ErrorCode::parallel_planes);
  // point: solve u.x = -u0, v.x = -v0, g.x = 0
  Eigen::Matrix3d a;
  a.row(0) = u.vec();
  a.row(1) = v.vec();
  a.row(2) = g;
  const Vec3 p = a.partialPivLu().solve(Vec3(-u.u0(), -v.u0(), 0.0));
  return PlueckerLine::through(p, g);
}

}  // namespace psk
