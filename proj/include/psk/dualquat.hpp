#pragma once

#include "psk/geom.hpp"

namespace psk {

namespace quat {

// Hamilton product on (w, x, y, z).
inline Vec4 mul(const Vec4& a, const Vec4& b) {
  const double a0 = a[0], b0 = b[0];
  const Vec3 av = a.tail<3>(), bv = b.tail<3>();
  Vec4 r;
  r[0] = a0 * b0 - av.dot(bv);
  r.tail<3>() = a0 * bv + b0 * av + av.cross(bv);
  return r;
}

inline Vec4 conj(const Vec4& a) { return Vec4(a[0], -a[1], -a[2], -a[3]); }
inline Vec4 pure(const Vec3& v) { return Vec4(0, v[0], v[1], v[2]); }

}  // namespace quat

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

// Dual quaternion [a0..a3 | a4..a7] = primal + eps * dual.
struct DualQuaternion {
  Vec8 c;

  DualQuaternion() { c.setZero(); c[0] = 1.0; }
  explicit DualQuaternion(const Vec8& v) : c(v) {}
  DualQuaternion(const Vec4& primal, const Vec4& dual) { c << primal, dual; }

  static DualQuaternion identity() { return {}; }

  // Pure translation by t.
  static DualQuaternion translation(const Vec3& t) {
    return {Vec4(1, 0, 0, 0), quat::pure(-0.5 * t)};
  }

  // Rotation by angle about an oriented line.
  static DualQuaternion rotation(const PlueckerLine& axis, double angle) {
    const Vec3 a = axis.direction();
    Vec4 p;
    p << std::cos(angle / 2), std::sin(angle / 2) * a;
    const Vec3 ctr = axis.point();
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, a).toRotationMatrix();
    const Vec3 t = ctr - r * ctr;
    return {p, quat::mul(quat::pure(-0.5 * t), p)};
  }

  static DualQuaternion from_motion(const Motion& mo) {
    const Eigen::Quaterniond q(mo.linear());
    const Vec4 p(q.w(), q.x(), q.y(), q.z());
    return {p, quat::mul(quat::pure(-0.5 * mo.translation_part()), p)};
  }

  Vec4 primal() const { return c.head<4>(); }
  Vec4 dual() const { return c.tail<4>(); }

  DualQuaternion operator*(const DualQuaternion& o) const {
    return {quat::mul(primal(), o.primal()),
            Vec4(quat::mul(primal(), o.dual()) + quat::mul(dual(), o.primal()))};
  }

  double study_residual() const { return primal().dot(dual()) / c.squaredNorm(); }

  // Primal norm 1 and first nonzero primal coordinate positive.
  DualQuaternion normalized() const {
    const double n = primal().norm();
    if (n == 0.0) throw GeometryError(ErrorCode::non_invertible);
    Vec8 v = c / n;
    for (int i = 0; i < 4; ++i) {
      if (std::abs(v[i]) > 1e-14) {
        if (v[i] < 0) v = -v;
        break;
      }
    }
    return DualQuaternion(v);
  }

  bool equals(const DualQuaternion& o, const Tolerances& tol = {}) const {
    return projective_distance(c, o.c) <= tol.rel;
  }
};

inline DualQuaternion dq_multiply(const DualQuaternion& a, const DualQuaternion& b) { return a * b; }

inline DualQuaternion dq_conjugate(const DualQuaternion& a) {
  return {quat::conj(a.primal()), quat::conj(a.dual())};
}

inline DualQuaternion dq_eps_conjugate(const DualQuaternion& a) { return {a.primal(), Vec4(-a.dual())}; }

inline DualQuaternion dq_vector_part(const DualQuaternion& a) {
  Vec8 v = a.c;
  v[0] = 0.0;
  v[4] = 0.0;
  return DualQuaternion(v);
}

inline DualQuaternion dq_inverse(const DualQuaternion& a, const Tolerances& tol = {}) {
  const double n0 = a.primal().squaredNorm();
  if (std::sqrt(n0) <= tol.abs * std::max(1.0, a.c.norm())) throw GeometryError(ErrorCode::non_invertible);
  const double n1 = 2.0 * a.primal().dot(a.dual());
  const Vec4 pc = quat::conj(a.primal()), dc = quat::conj(a.dual());
  return {Vec4(pc / n0), Vec4(dc / n0 - pc * n1 / (n0 * n0))};
}

// Matrix of X -> A * X.
inline Mat8 left_matrix(const DualQuaternion& a) {
  Mat8 m;
  for (int k = 0; k < 8; ++k) {
    Vec8 e = Vec8::Zero();
    e[k] = 1.0;
    m.col(k) = (a * DualQuaternion(e)).c;
  }
  return m;
}

// x0' + eps x' = eps-conj(A) * (x0 + eps x) * conj(A).
inline HPoint dq_act_point(const DualQuaternion& a, const HPoint& x, const Tolerances& tol = {}) {
  if (a.primal().norm() <= tol.abs * std::max(1.0, a.c.norm())) throw GeometryError(ErrorCode::non_invertible);
  const DualQuaternion xq(Vec4(x.x0(), 0, 0, 0), quat::pure(x.vec()));
  const DualQuaternion r = dq_eps_conjugate(a) * xq * dq_conjugate(a);
  return HPoint(r.c[0], r.c.tail<3>());
}

inline Motion to_motion(const DualQuaternion& a) {
  Eigen::Matrix4d m;
  for (int k = 0; k < 4; ++k) {
    Vec4 e = Vec4::Zero();
    e[k] = 1.0;
    m.col(k) = dq_act_point(a, HPoint(e)).c;
  }
  return Motion(m);
}

// Oriented line embedded as a pure dual quaternion (0, g) + eps (0, h).
inline DualQuaternion line_dq(const PlueckerLine& l) { return {quat::pure(l.g), quat::pure(l.h)}; }

// Symmetric pairing of the Study quadric.
struct StudyForm {
  static double value(const DualQuaternion& x, const DualQuaternion& y) {
    return 0.5 * (x.primal().dot(y.dual()) + y.primal().dot(x.dual()));
  }
};

// Axis of a relative displacement R in the fixed frame.
inline PlueckerLine rotation_axis_fixed(const DualQuaternion& r) {
  const Vec3 g = r.primal().tail<3>();
  const Vec3 h = -r.dual().tail<3>();
  return {g, h};
}

inline bool is_rotation(const DualQuaternion& a, const DualQuaternion& base, const Tolerances& tol = {}) {
  const DualQuaternion r = (a * dq_inverse(base, tol)).normalized();
  if (!tol.near_zero(r.c[4], 1.0 + r.dual().norm())) return false;
  return r.primal().tail<3>().norm() > tol.rel;
}

// Axis of R = A * base^-1 pulled back into the moving frame of base.
inline PlueckerLine rotation_axis_moving(const DualQuaternion& r, const DualQuaternion& base,
                                         const Tolerances& tol = {}) {
  const DualQuaternion rn = r.normalized();
  if (!tol.near_zero(rn.c[4], 1.0 + rn.dual().norm()) || rn.primal().tail<3>().norm() <= tol.rel)
    throw GeometryError(ErrorCode::not_a_rotation);
  const PlueckerLine fixed = rotation_axis_fixed(rn);
  return to_motion(dq_inverse(base, tol))(fixed);
}

struct StudyIntersection {
  DualQuaternion point;
  bool tangent = false;
};

// Second intersection of base + s*dir with the Study quadric.
inline StudyIntersection second_study_intersection(const DualQuaternion& base, const DualQuaternion& dir,
                                                   const Tolerances& tol = {}) {
  const double qd = StudyForm::value(dir, dir);
  const double om = StudyForm::value(base, dir);
  const double scale = base.c.norm() * dir.c.norm();
  const double qs = dir.c.squaredNorm();
  const bool qd0 = std::abs(qd) <= tol.rel * qs;
  const bool om0 = std::abs(om) <= tol.rel * scale;
  if (qd0 && om0) throw GeometryError(ErrorCode::line_in_quadric);
  if (om0) return {base, true};
  // Q(base + s dir) = 2 s om + s^2 qd = 0  ->  s = -2 om / qd, homogenized.
  return {DualQuaternion(Vec8(qd * base.c - 2.0 * om * dir.c)), false};
}

}  // namespace psk
