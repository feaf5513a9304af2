#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "psk/backlund.hpp"
#include "psk/dualquat.hpp"
#include "psk/net.hpp"

namespace psk {

// Fixed frame: N through p = (0,0,e) along (1,t,0), M through q = (0,0,-e) along (1,-t,0).
struct RotQuadConfig {
  double t = 1.0;
  double e = 0.5;
  std::uint64_t seed = 1;

  Vec3 p() const { return {0, 0, e}; }
  Vec3 q() const { return {0, 0, -e}; }
  Vec3 n() const { return {1, t, 0}; }
  Vec3 m() const { return {1, -t, 0}; }
  PlueckerLine line_n() const { return PlueckerLine::through(p(), n()); }
  PlueckerLine line_m() const { return PlueckerLine::through(q(), m()); }

  // -t^2 / ((1 + t^2)^2 e^2)
  double expected_curvature() const { return -t * t / ((1 + t * t) * (1 + t * t) * e * e); }
};

struct RotationQuadrilateral {
  std::array<DualQuaternion, 4> A;  // A[0] is the identity

  DualQuaternion relative(int i) const { return A[(i + 1) % 4] * dq_inverse(A[i]); }

  // Axis of A_{i+1} relative to A_i in the moving frame.
  PlueckerLine axis(int i) const { return rotation_axis_moving(relative(i), A[i]); }

  // R30 * R23 * R12 * R01 against the identity.
  double composition_residual() const {
    const DualQuaternion c = relative(3) * relative(2) * relative(1) * relative(0);
    return projective_distance(c.c, DualQuaternion::identity().c);
  }
};

namespace detail {

// Rows of the linear conditions on X: X relative to base is a rotation whose
// moving-frame axis meets N and M.
inline Eigen::Matrix<double, 3, 8> side_rows(const DualQuaternion& base, const RotQuadConfig& cfg) {
  Eigen::Matrix<double, 3, 8> r = Eigen::Matrix<double, 3, 8>::Zero();
  r(0, 4) = 1.0;
  const std::array<PlueckerLine, 2> lines{cfg.line_n(), cfg.line_m()};
  for (int k = 0; k < 2; ++k) {
    r.block<1, 3>(k + 1, 1) = lines[k].h.transpose();
    r.block<1, 3>(k + 1, 5) = -lines[k].g.transpose();
  }
  return r * left_matrix(dq_inverse(base));
}

inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& rows, double rel) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel * s[0]) ++rank;
  return svd.matrixV().rightCols(rows.cols() - rank);
}

}  // namespace detail

class RotQuadSampler {
 public:
  explicit RotQuadSampler(RotQuadConfig cfg, Tolerances tol = {}) : cfg_(cfg), tol_(tol), rng_(cfg.seed) {
    if (cfg.t == 0.0 || cfg.e == 0.0) throw GeometryError(ErrorCode::degenerate_input, "t and e must be nonzero");
  }

  const RotQuadConfig& config() const { return cfg_; }

  // Random displacement whose relative motion from the identity is a rotation about
  // an axis meeting N and M. The constraint space contains the identity and lies in the
  // quadric's tangent hyperplane there, so a random line of it (not through the
  // identity) is intersected with the quadric.
  DualQuaternion sample_side_position(int max_tries = 64) {
    const Eigen::MatrixXd ns = detail::null_space(detail::side_rows(DualQuaternion::identity(), cfg_), 1e-12);
    for (int attempt = 0; attempt < max_tries; ++attempt) {
      const DualQuaternion x(Vec8(ns * gaussian(ns.cols())));
      const DualQuaternion y(Vec8(ns * gaussian(ns.cols())));
      const double qa = StudyForm::value(y, y), qb = 2 * StudyForm::value(x, y), qc = StudyForm::value(x, x);
      const double disc = qb * qb - 4 * qa * qc;
      if (disc < 0 || qa == 0.0) continue;
      const double s = (-qb + (coin() ? 1 : -1) * std::sqrt(disc)) / (2 * qa);
      const DualQuaternion a(Vec8(x.c + s * y.c));
      if (!is_rotation(a, DualQuaternion::identity(), tol_)) continue;
      if (a.primal().tail<3>().norm() < 1e-3) continue;  // too close to the identity
      return a;
    }
    throw GeometryError(ErrorCode::degenerate_draw);
  }

  // The second intersection of the solution line of the six linear conditions with the quadric.
  DualQuaternion solve_fourth_position(const DualQuaternion& a1, const DualQuaternion& a3) const {
    Eigen::Matrix<double, 6, 8> rows;
    rows << detail::side_rows(a1, cfg_), detail::side_rows(a3, cfg_);
    const Eigen::MatrixXd ns = detail::null_space(rows, 1e-10);
    if (ns.cols() != 2) throw GeometryError(ErrorCode::degenerate_input, "solution space is not a line");
    // direction: the null vector orthogonal to the identity
    const Vec8 id = DualQuaternion::identity().c;
    Vec8 dir = ns.col(0) - id * id.dot(ns.col(0));
    const Vec8 alt = ns.col(1) - id * id.dot(ns.col(1));
    if (alt.norm() > dir.norm()) dir = alt;
    if (std::abs(ns.col(0).dot(id)) + std::abs(ns.col(1).dot(id)) < 1e-8)
      throw GeometryError(ErrorCode::degenerate_input, "identity not in solution space");
    const auto r = second_study_intersection(DualQuaternion::identity(), DualQuaternion(dir), tol_);
    if (r.tangent) throw GeometryError(ErrorCode::tangent_line);
    return r.point;
  }

  RotationQuadrilateral sample(int max_tries = 64) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
      try {
        RotationQuadrilateral q;
        q.A[1] = sample_side_position();
        q.A[3] = sample_side_position();
        q.A[2] = solve_fourth_position(q.A[1], q.A[3]);
        return q;
      } catch (const GeometryError&) {
      }
    }
    throw GeometryError(ErrorCode::degenerate_draw);
  }

 private:
  Eigen::VectorXd gaussian(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal_(rng_);
    return v;
  }
  bool coin() { return (rng_() & 1u) != 0; }

  RotQuadConfig cfg_;
  Tolerances tol_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct HomologousQuads {
  ElementaryQuad pn;  // images of (p, n)
  ElementaryQuad qm;  // images of (q, m)
  std::array<HPoint, 4> p_raw;
  std::array<HPoint, 4> n_raw;
  std::array<double, 4> kappa;
};

inline HomologousQuads homologous_quads(const RotationQuadrilateral& quad, const RotQuadConfig& cfg) {
  HomologousQuads out;
  for (int i = 0; i < 4; ++i) {
    const DualQuaternion& a = quad.A[i];
    out.kappa[i] = a.primal().squaredNorm();
    out.p_raw[i] = dq_act_point(a, HPoint::finite(cfg.p()));
    out.n_raw[i] = dq_act_point(a, HPoint::ideal(cfg.n()));
    const HPoint q = dq_act_point(a, HPoint::finite(cfg.q()));
    const HPoint m = dq_act_point(a, HPoint::ideal(cfg.m()));
    out.pn.e[i] = {out.p_raw[i].affine(), out.n_raw[i].vec().normalized()};
    out.qm.e[i] = {q.affine(), m.vec().normalized()};
  }
  return out;
}

// Signed xy-projected areas of the point and normal quads, on raw homogeneous coordinates.
inline std::pair<double, double> projected_areas(const HomologousQuads& h) {
  double s = 0.0, s0 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    const double w = h.kappa[(i + 2) % 4] * h.kappa[(i + 3) % 4];
    const Vec4 &p = h.p_raw[i].c, &pj = h.p_raw[j].c, &n = h.n_raw[i].c, &nj = h.n_raw[j].c;
    s += (p[1] * pj[2] - p[2] * pj[1]) * w;
    s0 += (n[1] * nj[2] - n[2] * nj[1]) * w;
  }
  return {s, s0};
}

// Monte-Carlo check of (1+t^2) e^2 S0 + t^2 S = 0 and K = -t^2 / ((1+t^2)^2 e^2).
// Trials with a projected area below 1e-6 * scale^2 are redrawn.
inline Report verify_theorem2(const RotQuadConfig& cfg, int trials, double tol = 1e-8,
                              std::optional<std::pair<double, double>> te_range = std::nullopt) {
  Report r;
  r.kind = "theorem2";
  if (trials < 1) throw GeometryError(ErrorCode::degenerate_input, "trials must be positive");
  std::mt19937_64 params(cfg.seed);
  for (int trial = 0; trial < trials; ++trial) {
    RotQuadConfig c = cfg;
    if (te_range) {
      std::uniform_real_distribution<double> u(te_range->first, te_range->second);
      c.t = u(params);
      c.e = u(params);
    }
    c.seed = params();
    RotQuadSampler sampler(c);
    for (int redraw = 0;; ++redraw) {
      if (redraw > 100) {
        r.fail("draw", {{trial, 0}});
        break;
      }
      const RotationQuadrilateral q = sampler.sample();
      const HomologousQuads h = homologous_quads(q, c);
      const auto [s, s0] = projected_areas(h);
      double kap = 1.0;
      for (double k : h.kappa) kap *= k;
      double scale = 0.0;
      for (const auto& e : h.pn.e) scale = std::max(scale, (e.p - h.pn.e[0].p).norm());
      const double area = std::abs(s) / kap;
      const double narea = std::abs(s0) / kap / (1 + c.t * c.t);
      if (area < 1e-6 * scale * scale || narea < 1e-6 * std::max(scale * scale * std::abs(c.expected_curvature()), 1e-300))
        continue;
      const double t2 = c.t * c.t;
      // S0 / S = -t^2 / ((1+t^2) e^2); the printed polynomial form carries the opposite sign
      r.check("area-ratio", std::abs((1 + t2) * c.e * c.e * s0 + t2 * s) / std::abs(t2 * s), tol, {{trial, 0}});
      r.metric("area-ratio-printed-sign", std::abs((1 + t2) * c.e * c.e * s0 - t2 * s) / std::abs(t2 * s), {{trial, 0}});
      const double k = gaussian_curvature(h.pn);
      const double kx = c.expected_curvature();
      r.check("curvature", std::abs(k - kx) / std::abs(kx), tol, {{trial, 0}});
      r.check("curvature-negative", k < 0 ? 0.0 : 1.0, 0.0, {{trial, 0}});
      // the mate quad can be nearly flat in one direction even when the p-quad is fine;
      // its vector area then loses most significant digits
      double qscale = 0.0;
      for (const auto& e : h.qm.e) qscale = std::max(qscale, (e.p - h.qm.e[0].p).norm());
      if (h.qm.point_area().norm() >= 1e-3 * qscale * qscale) {
        const double kq = gaussian_curvature(h.qm);
        r.check("curvature-mate", std::abs(kq - kx) / std::abs(kx), tol, {{trial, 0}});
      } else {
        r.metric("curvature-mate-skipped", 1.0, {{trial, 0}});
      }
      r.check("composition", q.composition_residual(), 1e-9, {{trial, 0}});
      r.metric("K", k, {{trial, 0}});
      break;
    }
  }
  return r;
}

}  // namespace psk
