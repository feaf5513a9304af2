#pragma once

#include <array>
#include <vector>

#include "psk/geom.hpp"
#include "psk/report.hpp"

namespace psk {

struct ContactElement {
  Vec3 p = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();

  ContactElement() = default;
  ContactElement(const Vec3& point, const Vec3& normal) : p(point), n(normal) {}

  PlueckerLine normal_line() const { return PlueckerLine::through(p, n); }
  HPlane tangent_plane() const { return HPlane::through(p, n); }

  ContactElement transformed(const Motion& m) const { return {m.apply_point(p), m.apply_vector(n).normalized()}; }
};

// rows x cols grid, row-major: element (i, j) at i * cols + j.
struct NetPatch {
  int rows = 0;
  int cols = 0;
  std::vector<ContactElement> elements;

  NetPatch() = default;
  NetPatch(int r, int c) : rows(r), cols(c), elements(static_cast<size_t>(r) * c) {
    if (r <= 0 || c <= 0) throw GeometryError(ErrorCode::degenerate_input, "empty net");
  }

  ContactElement& at(int i, int j) { return elements.at(index(i, j)); }
  const ContactElement& at(int i, int j) const { return elements.at(index(i, j)); }

  size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= rows || j >= cols) throw std::out_of_range("net index");
    return static_cast<size_t>(i) * cols + j;
  }

  NetPatch transformed(const Motion& m) const {
    NetPatch out = *this;
    for (auto& e : out.elements) e = e.transformed(m);
    return out;
  }

  NetPatch window(int i0, int j0, int r, int c) const {
    NetPatch out(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) out.at(i, j) = at(i0 + i, j0 + j);
    return out;
  }
};

struct Circle {
  Vec3 center;
  Vec3 axis;  // unit
  double radius;

  PlueckerLine axis_line() const { return PlueckerLine::through(center, axis); }

  double distance(const Vec3& x) const {
    const Vec3 d = x - center;
    const double h = d.dot(axis);
    const double rad = (d - h * axis).norm();
    return std::hypot(h, rad - radius);
  }
};

inline Circle circle_through(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Tolerances& tol = {}) {
  const Vec3 a = p1 - p0, b = p2 - p0;
  const Vec3 w = a.cross(b);
  if (w.norm() <= tol.rel * a.norm() * b.norm() || a.norm() == 0.0 || b.norm() == 0.0)
    throw GeometryError(ErrorCode::degenerate_circle);
  const Vec3 off = (a.squaredNorm() * b.cross(w) + b.squaredNorm() * w.cross(a)) / (2.0 * w.squaredNorm());
  return {p0 + off, w.normalized(), off.norm()};
}

// Mirror plane taking contact element a to b. For coincident points the plane
// through the point with normal n_b - n_a.
inline HPlane element_bisector(const ContactElement& a, const ContactElement& b, const Tolerances& tol = {}) {
  const double scale = 1.0 + std::max(a.p.norm(), b.p.norm());
  if (!tol.near_zero((a.p - b.p).norm(), scale))
    return bisector_plane(HPoint::finite(a.p), HPoint::finite(b.p), tol);
  const Vec3 u = b.n - a.n;
  if (u.norm() <= tol.rel) throw GeometryError(ErrorCode::degenerate_input, "identical contact elements");
  return HPlane::through(a.p, u);
}

inline double principal_residual(const ContactElement& a, const ContactElement& b, const Tolerances& tol = {}) {
  const double scale = 1.0 + std::max(a.p.norm(), b.p.norm());
  if (tol.near_zero((a.p - b.p).norm(), scale)) return 0.0;
  const Motion r = reflection_matrix(element_bisector(a, b, tol));
  return (r.apply_vector(a.n) - b.n).norm();
}

inline bool is_principal_pair(const ContactElement& a, const ContactElement& b, const Tolerances& tol = {}) {
  return principal_residual(a, b, tol) <= tol.rel;
}

// Bisector planes of (a.p, b.p) and (a.p + n_a, b.p + n_b) coincide.
inline double rotation_pair_residual(const ContactElement& a, const ContactElement& b, const Tolerances& tol = {}) {
  const ContactElement a1(a.p + a.n, a.n), b1(b.p + b.n, b.n);
  const HPlane u = element_bisector(a, b, tol), v = element_bisector(a1, b1, tol);
  return projective_distance(Vec4(u.c / u.vec().norm()), Vec4(v.c / v.vec().norm()));
}

struct ElementaryQuad {
  std::array<ContactElement, 4> e;

  ElementaryQuad() = default;
  explicit ElementaryQuad(const std::array<ContactElement, 4>& el) : e(el) {}

  static ElementaryQuad from_net(const NetPatch& net, int i, int j) {
    return ElementaryQuad({net.at(i, j), net.at(i + 1, j), net.at(i + 1, j + 1), net.at(i, j + 1)});
  }

  const ContactElement& operator[](int k) const { return e[((k % 4) + 4) % 4]; }

  Circle circle(const Tolerances& tol = {}) const { return circle_through(e[0].p, e[1].p, e[2].p, tol); }

  double concyclic_residual(const Tolerances& tol = {}) const {
    const Circle c = circle(tol);
    return c.distance(e[3].p) / c.radius;
  }

  double normals_coplanar_residual() const {
    Eigen::Matrix3d m;
    m.col(0) = e[1].n - e[0].n;
    m.col(1) = e[2].n - e[0].n;
    m.col(2) = e[3].n - e[0].n;
    return std::abs(m.determinant());
  }

  // h_{k,k+1}: meet of neighbouring normal lines (possibly ideal).
  HPoint h(int k, const Tolerances& tol = {}) const {
    return meet_plane_line(element_bisector((*this)[k], (*this)[k + 1], tol), (*this)[k].normal_line(), false, tol);
  }

  Vec3 point_area() const {
    Vec3 a = Vec3::Zero();
    for (int k = 0; k < 4; ++k) a += (*this)[k].p.cross((*this)[k + 1].p);
    return 0.5 * a;
  }

  Vec3 normal_area() const {
    Vec3 a = Vec3::Zero();
    for (int k = 0; k < 4; ++k) a += (*this)[k].n.cross((*this)[k + 1].n);
    return 0.5 * a;
  }

  ElementaryQuad reversed() const { return ElementaryQuad({e[3], e[2], e[1], e[0]}); }

  ElementaryQuad transformed(const Motion& m) const {
    ElementaryQuad q = *this;
    for (auto& x : q.e) x = x.transformed(m);
    return q;
  }
};

inline ElementaryQuad build_quad(const std::array<Vec3, 4>& pts, const Vec3& n0, const Tolerances& tol = {}) {
  const Circle c = circle_through(pts[0], pts[1], pts[2], tol);
  if (c.distance(pts[3]) > tol.rel * c.radius) throw GeometryError(ErrorCode::not_concyclic);
  std::array<ContactElement, 4> el;
  el[0] = {pts[0], n0.normalized()};
  for (int k = 0; k < 3; ++k) {
    const Motion r = reflection_matrix(bisector_plane(HPoint::finite(pts[k]), HPoint::finite(pts[k + 1]), tol));
    el[k + 1] = {pts[k + 1], r.apply_vector(el[k].n).normalized()};
  }
  const Motion r = reflection_matrix(bisector_plane(HPoint::finite(pts[3]), HPoint::finite(pts[0]), tol));
  const double closure = (r.apply_vector(el[3].n) - el[0].n).norm();
  if (closure > 10 * tol.rel) throw GeometryError(ErrorCode::not_concyclic, "reflection chain does not close");
  return ElementaryQuad(el);
}

// K = sign(A_n . A_p) |A_n| / |A_p| with polygon vector areas.
inline double gaussian_curvature(const ElementaryQuad& q, const Tolerances& tol = {}) {
  const Vec3 ap = q.point_area(), an = q.normal_area();
  double scale = 0.0;
  for (const auto& x : q.e) scale = std::max(scale, (x.p - q.e[0].p).squaredNorm());
  if (ap.norm() <= tol.rel * std::max(scale, 1e-300)) throw GeometryError(ErrorCode::degenerate_quad);
  const double k = an.norm() / ap.norm();
  return an.dot(ap) < 0 ? -k : k;
}

inline Report check_principal_net(const NetPatch& net, const Tolerances& tol = {}) {
  Report r;
  r.kind = "principal";
  for (int i = 0; i < net.rows; ++i) {
    for (int j = 0; j < net.cols; ++j) {
      if (i + 1 < net.rows) r.check("edge-i", principal_residual(net.at(i, j), net.at(i + 1, j), tol), tol.rel, {{i, j}});
      if (j + 1 < net.cols) r.check("edge-j", principal_residual(net.at(i, j), net.at(i, j + 1), tol), tol.rel, {{i, j}});
    }
  }
  for (int i = 0; i + 1 < net.rows; ++i) {
    for (int j = 0; j + 1 < net.cols; ++j) {
      const auto q = ElementaryQuad::from_net(net, i, j);
      try {
        r.check("quad-concyclic", q.concyclic_residual(tol), 10 * tol.rel, {{i, j}});
      } catch (const GeometryError&) {
        r.metric("quad-degenerate-circle", 1.0, {{i, j}});
        continue;
      }
      r.check("quad-normals-coplanar", q.normals_coplanar_residual(), 10 * tol.rel, {{i, j}});
      try {
        r.metric("quad-curvature", gaussian_curvature(q, tol), {{i, j}});
      } catch (const GeometryError&) {
        r.metric("quad-degenerate-area", 1.0, {{i, j}});
      }
    }
  }
  return r;
}

}  // namespace psk
