#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "psk/net.hpp"

namespace psk {

struct TransformFrame {
  HPoint h;      // N_i meet N_j
  HPoint k;      // M_i meet beta, possibly ideal
  HPlane beta;   // bisector of the source elements
  HPlane gamma;  // N_j join k
  Motion R;      // C * B
};

struct StepResult {
  ContactElement q;
  TransformFrame frame;
};

namespace detail {

inline Motion step_motion(const HPlane& beta, const PlueckerLine& ni, const PlueckerLine& nj, const PlueckerLine& mi,
                          TransformFrame& f, const Tolerances& tol) {
  f.beta = beta;
  f.h = meet_plane_line(beta, ni, false, tol);
  try {
    f.k = meet_plane_line(beta, mi, false, tol);
  } catch (const GeometryError&) {
    throw GeometryError(ErrorCode::gamma_degenerate, "M_i lies in the bisector plane");
  }
  f.gamma = join_line_point(nj, f.k);
  const double scale = f.k.c.norm() * nj.g.norm() * (1.0 + nj.h.norm() / nj.g.norm());
  if (f.gamma.vec().norm() <= tol.rel * scale) throw GeometryError(ErrorCode::gamma_degenerate, "k lies on N_j");
  try {
    f.R = rotation_from_two_reflections(beta, f.gamma, tol);
  } catch (const GeometryError&) {
    throw GeometryError(ErrorCode::gamma_degenerate, "beta parallel to gamma");
  }
  return f.R;
}

}  // namespace detail

// One step of the neighbour construction: the mate element at j from the one at i.
inline StepResult neighbour_step(const ContactElement& pi, const ContactElement& pj, const ContactElement& qi,
                                 const Tolerances& tol = {}) {
  if (!is_principal_pair(pi, pj, tol)) throw GeometryError(ErrorCode::not_principal_pair);
  StepResult out;
  const Motion r = detail::step_motion(element_bisector(pi, pj, tol), pi.normal_line(), pj.normal_line(),
                                       qi.normal_line(), out.frame, tol);
  out.q = qi.transformed(r);
  return out;
}

// Line-only variant for intersecting normal lines N_i, N_j.
inline PlueckerLine neighbour_line(const PlueckerLine& ni, const PlueckerLine& nj, const PlueckerLine& mi,
                                   const Tolerances& tol = {}) {
  const Vec3 a = ni.direction(), b = nj.direction();
  if ((a - b).norm() <= tol.rel) {
    if (ni.equals(nj, tol)) return mi;
    throw GeometryError(ErrorCode::parallel_lines);
  }
  const HPoint h = line_meet_point(ni, nj, tol);
  TransformFrame f;
  return detail::step_motion(HPlane::through(h.affine(), a - b), ni, nj, mi, f, tol)(mi);
}

namespace detail {

inline void check_tangent_plane(const ContactElement& p0, const Vec3& q0, const Tolerances& tol) {
  const double d = (q0 - p0.p).norm();
  if (std::abs((q0 - p0.p).dot(p0.n)) > tol.rel * std::max(1.0, d))
    throw GeometryError(ErrorCode::q0_not_in_tangent_plane);
  if (tol.near_zero(d, 1.0 + p0.p.norm())) throw GeometryError(ErrorCode::degenerate_seed, "q0 coincides with p0");
}

// Unit vector at signed angle phi from n0 around w (both unit, orthogonal).
inline Vec3 turn(const Vec3& n0, const Vec3& w, double phi) {
  return std::cos(phi) * n0 + std::sin(phi) * w.cross(n0);
}

}  // namespace detail

// The two admissible seed normals at q0 for curvature K: signed angles +phi and -phi
// from n0 with sin(phi) = d sqrt(-K).
inline std::array<Vec3, 2> seed_normals(const ContactElement& p0, const Vec3& q0, double k,
                                        const Tolerances& tol = {}) {
  detail::check_tangent_plane(p0, q0, tol);
  const double d = (q0 - p0.p).norm();
  if (!(k < 0)) throw GeometryError(ErrorCode::curvature_incompatible, "K must be negative");
  const double s = d * std::sqrt(-k);
  if (s > 1.0 + tol.rel) throw GeometryError(ErrorCode::curvature_incompatible, "d sqrt(-K) > 1");
  const double phi = std::asin(std::min(s, 1.0));
  if (phi <= tol.rel) throw GeometryError(ErrorCode::degenerate_seed, "m0 parallel to n0");
  const Vec3 w = (q0 - p0.p) / d;
  return {detail::turn(p0.n, w, phi), detail::turn(p0.n, w, -phi)};
}

// Same, also rejecting lines that meet the circle axis of a host quad with p0 at vertex 0.
inline std::array<Vec3, 2> seed_normals(const ElementaryQuad& quad, const Vec3& q0, double k,
                                        const Tolerances& tol = {}) {
  const auto m = seed_normals(quad[0], q0, k, tol);
  const Circle c = quad.circle(tol);
  for (const auto& v : m) {
    const auto cp = common_perpendicular(c.axis_line(), PlueckerLine::through(q0, v), tol);
    if (!cp.parallel && (cp.foot_m - cp.foot_n).norm() <= 1e-7 * c.radius)
      throw GeometryError(ErrorCode::degenerate_seed, "M0 meets the circle axis");
  }
  return m;
}

struct ClosureResult {
  double residual = 0.0;
  double point_error = 0.0;
  double normal_error = 0.0;
  ContactElement q_star;
  bool false_positive = false;
  std::string reason;
};

// Distance of the line through q with direction m from the circle axis, relative to the radius.
inline double axis_offset(const Circle& c, const Vec3& q, const Vec3& m) {
  const auto cp = common_perpendicular(c.axis_line(), PlueckerLine::through(q, m));
  if (cp.parallel) return std::numeric_limits<double>::infinity();
  return (cp.foot_m - cp.foot_n).norm() / c.radius;
}

inline ClosureResult quad_closure(const ElementaryQuad& quad, const ContactElement& q0, const Tolerances& tol = {}) {
  ContactElement q = q0;
  for (int k = 0; k < 4; ++k) q = neighbour_step(quad[k], quad[k + 1], q, tol).q;
  ClosureResult r;
  r.q_star = q;
  r.point_error = (q.p - q0.p).norm();
  r.normal_error = std::atan2(q.n.cross(q0.n).norm(), q.n.dot(q0.n));
  r.residual = std::max(r.point_error, r.normal_error);
  constexpr double kFlag = 1e-7;
  if (q0.n.cross(quad[0].n).norm() <= kFlag) {
    r.false_positive = true;
    r.reason = "M0 parallel to N0";
  } else if (axis_offset(quad.circle(tol), q0.p, q0.n) <= kFlag) {
    r.false_positive = true;
    r.reason = "M0 meets the circle axis";
  }
  return r;
}

// Pencil of candidate seed lines through q0 perpendicular to p0 q0:
// m0(lambda) ~ lambda * n0 + b, lambda = 0 meets the circle axis, lambda = inf is parallel to n0.
// Internally the pencil is walked by the angle beta from n0 about w = (q0 - p0) / |q0 - p0|,
// which stays well conditioned when b is nearly parallel to n0.
struct ClosurePencil {
  Vec3 q0;
  Vec3 n0;
  Vec3 b;   // unit
  Vec3 e2;  // w x n0
  double beta_b = 0.0;  // angle of b
  std::vector<double> numerator;      // fitted numerator, coefficients of s^k c^(deg-k), s = sin beta
  std::array<double, 3> quadratic{};  // q0 + q1 lambda + q2 lambda^2, zero unless the remainder is quadratic
  std::vector<double> roots;
  std::vector<Vec3> root_normals;
  std::vector<std::complex<double>> complex_roots;

  Vec3 normal(double lambda) const { return (lambda * n0 + b).normalized(); }
  Vec3 normal_at_angle(double beta) const { return std::cos(beta) * n0 + std::sin(beta) * e2; }
  double lambda_of_angle(double beta) const { return b.dot(e2) / std::tan(beta) - b.dot(n0); }
};

namespace detail {

// Angle of the rotation about N0 produced by running the closure cycle.
inline double cycle_angle(const ElementaryQuad& quad, const ContactElement& q0, const Tolerances& tol) {
  Motion t;
  ContactElement q = q0;
  for (int k = 0; k < 4; ++k) {
    const auto s = neighbour_step(quad[k], quad[k + 1], q, tol);
    t = s.frame.R * t;
    q = s.q;
  }
  const Vec3 n = quad[0].n;
  const Vec3 u = n.unitOrthogonal();
  return signed_angle(u, t.apply_vector(u), n);
}

}  // namespace detail

inline ClosurePencil closure_pencil(const ElementaryQuad& quad, const Vec3& q0, const Tolerances& tol = {}) {
  const ContactElement& p0 = quad[0];
  detail::check_tangent_plane(p0, q0, tol);
  const Vec3 w = (q0 - p0.p).normalized();
  const Circle c = quad.circle(tol);
  const Vec3 b = c.axis.dot(w) * (c.center - q0) + (q0 - c.center).dot(w) * c.axis;
  if (b.norm() <= tol.rel * (1.0 + (q0 - c.center).norm()))
    throw GeometryError(ErrorCode::degenerate_seed, "every pencil line meets the circle axis");
  ClosurePencil out;
  out.q0 = q0;
  out.n0 = p0.n;
  out.b = b.normalized();
  out.e2 = w.cross(p0.n).normalized();
  out.beta_b = std::atan2(out.b.dot(out.e2), out.b.dot(out.n0));
  return out;
}

namespace detail {

// p(x) / (x - r) when the remainder is negligible.
inline bool deflate(std::vector<double>& p, double r, double rel) {
  if (p.size() < 2) return false;
  std::vector<double> q(p.size() - 1);
  double acc = p.back();
  for (size_t k = p.size() - 1; k-- > 0;) {
    q[k] = acc;
    acc = p[k] + r * acc;
  }
  double big = 0.0;
  for (double x : p) big = std::max(big, std::abs(x));
  if (std::abs(acc) > rel * big * std::max(1.0, std::pow(std::abs(r), static_cast<double>(p.size() - 1)))) return false;
  p = std::move(q);
  return true;
}

}  // namespace detail

// Roots of the closure condition in the seed pencil, spurious factors removed.
//
// One trip around the quad maps (p0, n0) to itself, so it is a rotation about N0 by
// some angle theta, and tan(theta / 2) is rational on the pencil. It is fitted in
// homogeneous form (s, c) = (sin, cos) of the pencil angle, using the lowest degree
// that fits exactly; the factors for n0 (lambda = inf) and b (lambda = 0) are spurious.
// Genuine roots can sit arbitrarily close to a spurious one, where the fit is badly
// conditioned, so a scan clustered there adds candidates. Every candidate is refined
// on theta itself.
inline ClosurePencil closure_roots(const ElementaryQuad& quad, const Vec3& q0, const Tolerances& tol = {}) {
  ClosurePencil pen = closure_pencil(quad, q0, tol);
  constexpr double kPi = std::numbers::pi;
  const auto theta_at = [&](double beta) {
    try {
      return detail::cycle_angle(quad, ContactElement(q0, pen.normal_at_angle(beta)), tol);
    } catch (const GeometryError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  constexpr int kSamples = 17;
  std::vector<std::array<double, 3>> samples;  // s, c, theta
  for (int i = 0; i < kSamples; ++i) {
    const double beta = -kPi / 2 + kPi * (i + 0.5) / kSamples;
    const double th = theta_at(beta);
    if (std::isfinite(th)) samples.push_back({std::sin(beta), std::cos(beta), th});
  }
  if (samples.size() < 12) throw GeometryError(ErrorCode::degenerate_seed, "closure samples undefined");

  std::vector<double> num;
  for (int deg = 1; deg <= 4 && num.empty(); ++deg) {
    Eigen::MatrixXd rows(samples.size(), 2 * (deg + 1));
    for (size_t r = 0; r < samples.size(); ++r) {
      const auto [s, c, th] = samples[r];
      for (int k = 0; k <= deg; ++k) {
        const double mono = std::pow(s, k) * std::pow(c, deg - k);
        // cos(t/2) num - sin(t/2) den = 0
        rows(r, k) = std::cos(th / 2) * mono;
        rows(r, deg + 1 + k) = -std::sin(th / 2) * mono;
      }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] > 1e-9 * sv[0]) continue;
    const Eigen::VectorXd v = svd.matrixV().col(rows.cols() - 1);
    num.assign(v.data(), v.data() + deg + 1);
  }
  if (num.empty()) throw GeometryError(ErrorCode::spurious_only, "no exact rational fit up to degree 4");
  pen.numerator = num;
  double big = 0.0;
  for (double x : num) big = std::max(big, std::abs(x));
  if (big <= tol.abs) throw GeometryError(ErrorCode::spurious_only, "closure holds for the whole pencil");

  // dehomogenize in u = tan(beta); n0 is u = 0, b is u = tan(beta_b)
  std::vector<double> rem = num;
  detail::deflate(rem, 0.0, 1e-6);
  detail::deflate(rem, std::tan(pen.beta_b), 1e-6);
  while (rem.size() > 1 && std::abs(rem.back()) <= 1e-9 * big) rem.pop_back();
  std::vector<double> candidates;  // in beta
  if (rem.size() >= 2) {
    const Eigen::Map<const Eigen::VectorXd> coeffs(rem.data(), static_cast<Eigen::Index>(rem.size()));
    const Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    for (const std::complex<double>& z : solver.roots())
      if (std::abs(z.imag()) <= 1e-6 * (1.0 + std::abs(z))) candidates.push_back(std::atan(z.real()));
  }
  if (rem.size() == 3) {
    // substitute u = by / (lambda + bx)
    const double bx = pen.b.dot(pen.n0), by = pen.b.dot(pen.e2);
    pen.quadratic = {rem[0] * bx * bx + rem[1] * by * bx + rem[2] * by * by, 2 * rem[0] * bx + rem[1] * by, rem[0]};
    const auto& q = pen.quadratic;
    const double disc = q[1] * q[1] - 4 * q[2] * q[0];
    if (disc < 0 && q[2] != 0.0) {
      const std::complex<double> sq(0.0, std::sqrt(-disc));
      pen.complex_roots = {(-q[1] + sq) / (2 * q[2]), (-q[1] - sq) / (2 * q[2])};
    }
  }

  // scan: uniform plus points clustered at the two spurious angles
  std::vector<double> grid;
  for (int i = 1; i < 360; ++i) grid.push_back(-kPi / 2 + kPi * i / 360);
  for (int k = 3; k <= 9; ++k) {
    const double h = std::pow(10.0, -k);
    for (double c : {0.0, std::remainder(pen.beta_b, kPi)})
      for (double a : {c - h, c + h}) grid.push_back(std::remainder(a, kPi));
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> th(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) th[i] = theta_at(grid[i]);
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    const double f0 = th[i], f1 = th[i + 1];
    if (!std::isfinite(f0) || !std::isfinite(f1) || f0 * f1 > 0) continue;
    if (std::abs(f0) > kPi / 2 || std::abs(f1) > kPi / 2) continue;  // wrap through +-pi
    double lo = grid[i], hi = grid[i + 1], flo = f0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi), fm = theta_at(mid);
      if (!std::isfinite(fm)) break;
      if ((fm < 0) == (flo < 0)) {
        lo = mid, flo = fm;
      } else {
        hi = mid;
      }
    }
    candidates.push_back(0.5 * (lo + hi));
  }

  std::vector<double> found;
  for (double a0 : candidates) {
    double x0 = a0, x1 = a0 + 1e-9;
    double f0 = theta_at(x0), f1 = theta_at(x1);
    for (int it = 0; it < 30 && std::isfinite(f1) && std::abs(f1) > 1e-15 && f1 != f0; ++it) {
      const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
      x0 = x1, f0 = f1;
      x1 = x2, f1 = theta_at(x1);
    }
    if (!std::isfinite(f1) || std::abs(f1) > tol.twist) continue;
    x1 = std::remainder(x1, kPi);
    if (std::abs(x1) < 1e-7 || std::abs(std::remainder(x1 - pen.beta_b, kPi)) < 1e-7) continue;  // spurious
    bool dup = false;
    for (double a : found) dup = dup || std::abs(std::remainder(a - x1, kPi)) < 1e-8;
    if (!dup) found.push_back(x1);
  }
  std::sort(found.begin(), found.end(),
            [&](double x, double y) { return pen.lambda_of_angle(x) < pen.lambda_of_angle(y); });
  for (double a : found) {
    pen.roots.push_back(pen.lambda_of_angle(a));
    pen.root_normals.push_back(pen.normal_at_angle(a));
  }
  return pen;
}

struct PropagateOptions {
  // Sources with undefined quad curvature (axis nets): skip the curvature gate.
  bool degenerate_source = false;
  Tolerances tol{};
};

struct Propagation {
  NetPatch net;
  double max_closure = 0.0;
  double d = 0.0;
  double phi = 0.0;
  double twist = 0.0;
  double curvature = 0.0;  // of the source, NaN in degenerate mode
};

// Mean curvature of all quads; throws when the spread exceeds the curvature tolerance.
inline double constant_curvature(const NetPatch& net, const Tolerances& tol = {}) {
  std::vector<double> ks;
  for (int i = 0; i + 1 < net.rows; ++i)
    for (int j = 0; j + 1 < net.cols; ++j) ks.push_back(gaussian_curvature(ElementaryQuad::from_net(net, i, j), tol));
  if (ks.empty()) throw GeometryError(ErrorCode::inconsistent_curvature, "net has no quads");
  const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
  double mean = 0.0;
  for (double k : ks) mean += k;
  mean /= ks.size();
  if (*hi - *lo > tol.curvature * std::abs(mean))
    throw GeometryError(ErrorCode::inconsistent_curvature,
                        "spread " + sci(*hi - *lo) + " around " + sci(mean));
  return mean;
}

inline Propagation propagate(const NetPatch& source, const ContactElement& seed, const PropagateOptions& opt = {}) {
  const Tolerances& tol = opt.tol;
  const Report pr = check_principal_net(source, tol);
  if (!pr.failures("edge").empty()) {
    const auto f = pr.failures("edge").front();
    throw GeometryError(ErrorCode::not_principal_pair,
                        "source edge at (" + std::to_string(f.at->first) + "," + std::to_string(f.at->second) + ")");
  }
  const ContactElement& p0 = source.at(0, 0);
  detail::check_tangent_plane(p0, seed.p, tol);
  const Vec3 w = seed.p - p0.p;
  if (std::abs(seed.n.dot(w)) > tol.rel * std::max(1.0, w.norm()))
    throw GeometryError(ErrorCode::degenerate_seed, "m0 not perpendicular to p0 q0");
  Propagation out;
  const TwistResult tw = twist(p0.normal_line(), seed.normal_line(), tol);
  if (tw.parallel) throw GeometryError(ErrorCode::degenerate_seed, "m0 parallel to n0");
  out.d = tw.distance;
  out.phi = tw.angle;
  out.twist = tw.value;
  out.curvature = std::numeric_limits<double>::quiet_NaN();
  if (!opt.degenerate_source && source.rows > 1 && source.cols > 1) {
    out.curvature = constant_curvature(source, tol);
    if (std::abs(out.twist * out.twist + out.curvature) > tol.curvature * std::abs(out.curvature) * 10)
      throw GeometryError(ErrorCode::curvature_incompatible,
                          "twist^2 = " + sci(out.twist * out.twist) + ", -K = " + sci(-out.curvature));
  }

  NetPatch& q = out.net;
  q = NetPatch(source.rows, source.cols);
  q.at(0, 0) = seed;
  for (int j = 1; j < source.cols; ++j) q.at(0, j) = neighbour_step(source.at(0, j - 1), source.at(0, j), q.at(0, j - 1), tol).q;
  for (int i = 1; i < source.rows; ++i)
    for (int j = 0; j < source.cols; ++j)
      q.at(i, j) = neighbour_step(source.at(i - 1, j), source.at(i, j), q.at(i - 1, j), tol).q;

  for (int i = 0; i + 1 < source.rows; ++i) {
    for (int j = 0; j + 1 < source.cols; ++j) {
      const ContactElement alt = neighbour_step(source.at(i + 1, j), source.at(i + 1, j + 1), q.at(i + 1, j), tol).q;
      const ContactElement& got = q.at(i + 1, j + 1);
      const double res = std::max((alt.p - got.p).norm() / (1.0 + got.p.norm()), (alt.n - got.n).norm());
      out.max_closure = std::max(out.max_closure, res);
      if (res > tol.rel)
        throw GeometryError(ErrorCode::closure_violation, "quad (" + std::to_string(i) + "," + std::to_string(j) +
                                                              ") residual " + sci(res));
    }
  }
  return out;
}

// Signed angle of the mate normal from the source normal, viewed along p -> q.
inline double mate_angle(const ContactElement& a, const ContactElement& b) {
  return signed_angle(a.n, b.n, b.p - a.p);
}

inline Report verify_mates(const NetPatch& a, const NetPatch& b, const Tolerances& tol = {}) {
  Report r;
  r.kind = "mates";
  if (a.rows != b.rows || a.cols != b.cols) {
    r.fail("dimensions");
    return r;
  }
  const size_t n = a.elements.size();
  std::vector<double> ds(n), phis(n);
  for (size_t k = 0; k < n; ++k) {
    ds[k] = (b.elements[k].p - a.elements[k].p).norm();
    phis[k] = ds[k] > 0 ? mate_angle(a.elements[k], b.elements[k]) : 0.0;
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const double dm = median(ds), pm = median(phis);
  const auto [dlo, dhi] = std::minmax_element(ds.begin(), ds.end());
  const auto [plo, phi_hi] = std::minmax_element(phis.begin(), phis.end());
  r.metric("d", dm);
  r.metric("phi", pm);
  r.metric("d-spread", *dhi - *dlo);
  r.metric("phi-spread", *phi_hi - *plo);
  const double k_expected = -std::pow(std::sin(pm) / dm, 2);
  r.metric("curvature", k_expected);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      const size_t k = a.index(i, j);
      const ContactElement &x = a.elements[k], &y = b.elements[k];
      if (ds[k] <= tol.abs) {
        r.fail("distance-positive", {{i, j}});
        continue;
      }
      const Vec3 w = (y.p - x.p) / ds[k];
      r.check("distance-constant", std::abs(ds[k] - dm), tol.rel * std::max(1.0, dm), {{i, j}});
      r.check("angle-constant", std::abs(phis[k] - pm), tol.rel, {{i, j}});
      r.check("tangent-planes", std::max(std::abs(x.n.dot(w)), std::abs(y.n.dot(w))), tol.rel, {{i, j}});
    }
  }
  for (const auto* net : {&a, &b}) {
    const std::string tag = net == &a ? "curvature-a" : "curvature-b";
    for (int i = 0; i + 1 < net->rows; ++i) {
      for (int j = 0; j + 1 < net->cols; ++j) {
        double k;
        try {
          k = gaussian_curvature(ElementaryQuad::from_net(*net, i, j), tol);
        } catch (const GeometryError&) {
          r.metric(tag + "-undefined", 1.0, {{i, j}});
          continue;
        }
        r.check(tag, std::abs(k - k_expected) / std::max(std::abs(k_expected), tol.abs), tol.curvature, {{i, j}});
      }
    }
  }
  return r;
}

// Angle of the common perpendicular from axis n to line l, measured from the one to ref.
inline double family_angle(const PlueckerLine& n, const PlueckerLine& ref, const PlueckerLine& l,
                           const Tolerances& tol = {}) {
  const auto a = common_perpendicular(n, ref, tol), b = common_perpendicular(n, l, tol);
  const Vec3 ra = a.foot_m - a.foot_n, rb = b.foot_m - b.foot_n;
  if (ra.norm() <= tol.abs || rb.norm() <= tol.abs) throw GeometryError(ErrorCode::intersecting_lines);
  return signed_angle(ra, rb, n.g);
}

// Cross-ratio of four parameters given as half-angles (tan of each is the parameter).
inline double cross_ratio_angles(const std::array<double, 4>& h) {
  return std::sin(h[2] - h[0]) * std::sin(h[3] - h[1]) / (std::sin(h[2] - h[1]) * std::sin(h[3] - h[0]));
}

inline Report projectivity_check(const PlueckerLine& n0, const PlueckerLine& n1, const PlueckerLine& m0,
                                 const std::array<double, 4>& lambdas, const Tolerances& tol = {}) {
  Report r;
  r.kind = "projectivity";
  std::array<PlueckerLine, 4> out;
  std::array<double, 4> in_half{}, out_half{};
  for (int k = 0; k < 4; ++k) {
    in_half[k] = std::atan(lambdas[k]);
    const PlueckerLine mk = Motion::rotation(n0, 2 * in_half[k])(m0);
    try {
      out[k] = neighbour_line(n0, n1, mk, tol);
    } catch (const GeometryError& e) {
      throw GeometryError(ErrorCode::degenerate_input, std::string("image line undefined: ") + e.what());
    }
  }
  for (int k = 0; k < 4; ++k) out_half[k] = 0.5 * family_angle(n1, out[0], out[k], tol);
  const double cin = cross_ratio_angles(in_half), cout = cross_ratio_angles(out_half);
  r.metric("cross-ratio-in", cin);
  r.metric("cross-ratio-out", cout);
  r.check("cross-ratio", std::abs(cin - cout) / std::max(1.0, std::abs(cin)), 10 * tol.rel);
  return r;
}

// The map eta on the rotation family of M0 about N0 induced by one trip around the quad,
// as a Moebius map lambda -> (a lambda + b) / (c lambda + d) on lambda = tan(angle / 2).
struct Moebius {
  double a = 1, b = 0, c = 0, d = 1;
  // Fixed points solve c x^2 + (d - a) x - b = 0.
  std::array<double, 3> fixed_quadratic() const { return {-b, d - a, c}; }
};

inline Moebius eta_map(const ElementaryQuad& quad, const PlueckerLine& m0, const Tolerances& tol = {}) {
  std::array<PlueckerLine, 4> ns;
  for (int k = 0; k < 4; ++k) ns[k] = quad[k].normal_line();
  constexpr int kSamples = 9;
  Eigen::Matrix<double, kSamples, 4> rows;
  for (int i = 0; i < kSamples; ++i) {
    const double x = -std::numbers::pi / 2 + std::numbers::pi * (i + 0.5) / kSamples;
    PlueckerLine l = Motion::rotation(ns[0], 2 * x)(m0);
    for (int k = 0; k < 4; ++k) l = neighbour_line(ns[k], ns[(k + 1) % 4], l, tol);
    const double y = 0.5 * family_angle(ns[0], m0, l, tol);
    // (c sx + d cx) sy - (a sx + b cx) cy = 0
    const double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y);
    rows.row(i) << -sx * cy, -cx * cy, sx * sy, cx * sy;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const Eigen::Vector4d v = svd.matrixV().col(3);
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace psk
