#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "psk/backlund.hpp"

namespace psk {

// Axes K, L, N, M of a four-bar with normal feet a, b, d, c. Adjacent pairs are
// (K, L), (L, N), (N, M), (M, K).
struct BennettFrame {
  PlueckerLine K, L, N, M;
  Vec3 a, b, d, c;

  static BennettFrame from_elements(const ContactElement& a, const ContactElement& b, const ContactElement& c,
                                    const ContactElement& d) {
    return {a.normal_line(), b.normal_line(), d.normal_line(), c.normal_line(), a.p, b.p, d.p, c.p};
  }
};

namespace detail {

// |t1 - t2| relative to the larger magnitude; 0 when both vanish.
inline double twist_residual(double t1, double t2) {
  const double s = std::max(std::abs(t1), std::abs(t2));
  return s == 0.0 ? 0.0 : std::abs(t1 - t2) / s;
}

}  // namespace detail

// Distance and twist equalities of a Bennett linkage. Metrics "special" (all four twists
// equal in magnitude) and "degenerate" (all twists zero) are 0 or 1.
inline Report bennett_check(const BennettFrame& f, const Tolerances& tol = {}) {
  Report r;
  r.kind = "bennett";
  const double scale = 1.0 + std::max({f.a.norm(), f.b.norm(), f.c.norm(), f.d.norm()});
  const double ab = (f.a - f.b).norm(), cd = (f.c - f.d).norm();
  const double ac = (f.a - f.c).norm(), bd = (f.b - f.d).norm();
  r.check("dist-ab-cd", std::abs(ab - cd), tol.rel * scale);
  r.check("dist-ac-bd", std::abs(ac - bd), tol.rel * scale);

  const auto tw = [&](const PlueckerLine& x, const PlueckerLine& y) {
    try {
      return twist(x, y, tol).value;
    } catch (const GeometryError&) {
      return 0.0;  // intersecting axes
    }
  };
  const double t_kl = tw(f.K, f.L), t_mn = tw(f.M, f.N), t_km = tw(f.K, f.M), t_ln = tw(f.L, f.N);
  r.check("twist-ab-cd", detail::twist_residual(t_kl, t_mn), tol.twist);
  r.check("twist-ac-bd", detail::twist_residual(t_km, t_ln), tol.twist);

  const double big = std::max({std::abs(t_kl), std::abs(t_mn), std::abs(t_km), std::abs(t_ln)});
  const bool degenerate = big * scale <= tol.rel;
  double spread = 0.0;
  for (double t : {t_mn, t_km, t_ln}) spread = std::max(spread, detail::twist_residual(std::abs(t_kl), std::abs(t)));
  r.metric("twist-ab", t_kl);
  r.metric("twist-ac", t_km);
  r.metric("twist-magnitude-spread", spread);
  r.metric("special", !degenerate && spread <= tol.twist ? 1.0 : 0.0);
  r.metric("degenerate", degenerate ? 1.0 : 0.0);
  return r;
}

struct HalfTurn {
  PlueckerLine axis;
  Motion motion;
  double residual = 0.0;  // of the swap
};

// The half-turn exchanging (b, l) and (c, m).
inline HalfTurn halfturn_axis(const ContactElement& b, const ContactElement& c, const Tolerances& tol = {}) {
  const double scale = 1.0 + std::max(b.p.norm(), c.p.norm());
  const Vec3 bc = c.p - b.p;
  const Vec3 s = b.n + c.n;
  Vec3 u;
  if (s.norm() > tol.rel) {
    u = s.normalized();
    if (!tol.near_zero(u.dot(bc), scale))
      throw GeometryError(ErrorCode::no_halfturn, "normal bisector not perpendicular to b - c");
  } else {
    u = b.n.cross(bc);
    if (u.norm() <= tol.rel * scale) throw GeometryError(ErrorCode::no_halfturn, "axis ambiguous");
    u.normalize();
  }
  if (tol.near_zero(bc.norm(), scale) && (b.n - c.n).norm() <= tol.rel)
    throw GeometryError(ErrorCode::no_halfturn, "identical elements, axis ambiguous");

  HalfTurn h;
  h.axis = PlueckerLine::through(0.5 * (b.p + c.p), u);
  h.motion = Motion::rotation(h.axis, std::numbers::pi);
  const ContactElement hb = b.transformed(h.motion), hc = c.transformed(h.motion);
  h.residual = std::max({(hb.p - c.p).norm() / scale, (hb.n - c.n).norm(), (hc.p - b.p).norm() / scale,
                         (hc.n - b.n).norm()});
  if (h.residual > tol.rel) throw GeometryError(ErrorCode::no_halfturn, "swap residual");
  return h;
}

// Residuals of the completed element against the three mates: Bennett pairings and
// tangency of d's normal to both connecting vectors.
inline Report completion_report(const ContactElement& a, const ContactElement& b, const ContactElement& c,
                                const ContactElement& d, const Tolerances& tol = {}) {
  Report r = bennett_check(BennettFrame::from_elements(a, b, c, d), tol);
  r.kind = "completion";
  const double scale = 1.0 + std::max({a.p.norm(), b.p.norm(), c.p.norm()});
  r.check("normal-perp-b", std::abs(d.n.dot(d.p - b.p)), tol.rel * scale);
  r.check("normal-perp-c", std::abs(d.n.dot(d.p - c.p)), tol.rel * scale);
  return r;
}

// The fourth element completing (a, b, c): a turned about the half-turn axis of (b, c).
inline ContactElement complete_element(const ContactElement& a, const ContactElement& b, const ContactElement& c,
                                       const Tolerances& tol = {}) {
  const double t_ab = twist(a.normal_line(), b.normal_line(), tol).value;
  const double t_ac = twist(a.normal_line(), c.normal_line(), tol).value;
  if (detail::twist_residual(std::abs(t_ab), std::abs(t_ac)) > tol.twist)
    throw GeometryError(ErrorCode::twist_mismatch);
  const HalfTurn h = halfturn_axis(b, c, tol);
  const ContactElement d = a.transformed(h.motion);
  const Report post = completion_report(a, b, c, d, tol);
  if (!post.passed()) throw GeometryError(ErrorCode::inconsistent_inputs, "completion: " + post.failures()[0].name);
  return d;
}

struct Completion {
  NetPatch net;
  Report report;
};

// Fourth net of the permutability square of a and its mates b, c.
inline Completion complete_net(const NetPatch& a, const NetPatch& b, const NetPatch& c, const Tolerances& tol = {}) {
  if (a.rows != b.rows || a.rows != c.rows || a.cols != b.cols || a.cols != c.cols)
    throw GeometryError(ErrorCode::inconsistent_inputs, "net sizes differ");
  for (const NetPatch* x : {&b, &c}) {
    const Report m = verify_mates(a, *x, tol);
    if (!m.passed())
      throw GeometryError(ErrorCode::inconsistent_inputs, (x == &b ? "b: " : "c: ") + m.failures()[0].name);
  }
  const double t_ab = twist(a.at(0, 0).normal_line(), b.at(0, 0).normal_line(), tol).value;
  const double t_ac = twist(a.at(0, 0).normal_line(), c.at(0, 0).normal_line(), tol).value;
  if (detail::twist_residual(std::abs(t_ab), std::abs(t_ac)) > tol.twist)
    throw GeometryError(ErrorCode::inconsistent_inputs, "twists of b and c differ");

  Completion out{NetPatch(a.rows, a.cols), {}};
  Report& r = out.report;
  r.kind = "bianchi";
  std::vector<std::string> errors;
  ErrorCode first = ErrorCode::no_halfturn;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      try {
        out.net.at(i, j) = complete_element(a.at(i, j), b.at(i, j), c.at(i, j), tol);
      } catch (const GeometryError& e) {
        if (errors.empty()) first = e.code();
        errors.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ") " + e.what());
      }
    }
  if (!errors.empty())
    throw GeometryError(first, std::to_string(errors.size()) + " element(s) failed, first " + errors.front());

  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      const Report e = completion_report(a.at(i, j), b.at(i, j), c.at(i, j), out.net.at(i, j), tol);
      for (const auto& ch : e.checks) r.check("bennett-" + ch.name, ch.residual, ch.tolerance, {{i, j}});
      for (const auto& m : e.metrics)
        if (m.name == "special") r.metric("bennett-special", m.value, {{i, j}});
      // two rotations map each element to its neighbours
      if (i + 1 < a.rows)
        r.check("rotation-pair", rotation_pair_residual(out.net.at(i, j), out.net.at(i + 1, j), tol), tol.rel, {{i, j}});
      if (j + 1 < a.cols)
        r.check("rotation-pair", rotation_pair_residual(out.net.at(i, j), out.net.at(i, j + 1), tol), tol.rel, {{i, j}});
    }
  r.append(check_principal_net(out.net, tol), "principal/");
  r.append(verify_mates(b, out.net, tol), "mates-b/");
  r.append(verify_mates(c, out.net, tol), "mates-c/");
  return out;
}

}  // namespace psk
