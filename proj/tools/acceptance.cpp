// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status 0 when the set of failing criteria equals --expect-fail (empty by default).

#include <chrono>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "psk/bianchi.hpp"
#include "psk/examples.hpp"
#include "psk/io.hpp"
#include "psk/rotquad.hpp"

namespace {

using namespace psk;

constexpr double kPi = std::numbers::pi;

struct Line {
  int id;
  bool pass;
  std::string text;
};

void print(const Line& l) { std::printf("criterion %d: %s  %s\n", l.id, l.pass ? "PASS" : "FAIL", l.text.c_str()); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  return Vec3(n(g), n(g), n(g)).normalized();
}

double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

// Tractrix window with constant negative curvature, away from the axis.
NetPatch pseudosphere_patch() {
  TractrixParams par;
  par.rows = 7;
  par.cols = 7;
  return tractrix_net(par).window(0, 1, 5, 5);
}

Vec3 random_seed_point(const NetPatch& a, double k, std::mt19937_64& g) {
  const ContactElement& p0 = a.at(0, 0);
  const Vec3 u = p0.n.unitOrthogonal(), v = p0.n.cross(u);
  const double ang = uniform(g, 0, 2 * kPi), dist = uniform(g, 0.1, 0.9) / std::sqrt(-k);
  return p0.p + dist * (std::cos(ang) * u + std::sin(ang) * v);
}

// Shared by criteria 1 and 2.
struct RotquadRun {
  Report report;
  double seconds = 0;
};

RotquadRun rotquad_run() {
  RotQuadConfig cfg;
  cfg.seed = 42;
  const auto t0 = std::chrono::steady_clock::now();
  RotquadRun r{verify_theorem2(cfg, 100, 1e-8, std::make_pair(0.2, 2.0)), 0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Line criterion1(const RotquadRun& run) {
  // the polynomial with the sign as printed; the corrected sign is reported alongside
  double printed = 0;
  int trials = 0;
  for (const auto& m : run.report.metrics)
    if (m.name == "area-ratio-printed-sign") printed = std::max(printed, m.value), ++trials;
  const double corrected = run.report.max_residual("area-ratio");
  const bool pass = trials == 100 && printed < 1e-8 && run.seconds < 10;
  return {1, pass,
          fmt("(1+t^2)e^2 S0 - t^2 S over 100 draws, t,e in [0.2,2]: max rel residual %.3g (tol 1e-8); "
              "with + sign %.3g; %.3f s (limit 10 s)",
              printed, corrected, run.seconds)};
}

Line criterion2(const RotquadRun& run) {
  const double k = run.report.max_residual("curvature");
  const bool neg = run.report.failures("curvature-negative").empty();
  RotQuadConfig unit;
  unit.t = 1;
  unit.e = 0.5;
  unit.seed = 43;
  const Report u = verify_theorem2(unit, 20);
  double worst = 0;
  for (const auto& m : u.metrics)
    if (m.name == "K") worst = std::max(worst, std::abs(m.value + 1));
  const bool pass = k < 1e-8 && neg && u.passed() && worst < 1e-8;
  return {2, pass,
          fmt("quad curvature vs -t^2/((1+t^2)^2 e^2): max rel residual %.3g (tol 1e-8); t=1 e=1/2: max |K+1| %.3g", k,
              worst)};
}

Line criterion3() {
  const NetPatch a = pseudosphere_patch();
  const double k = constant_curvature(a);
  const ElementaryQuad quad = ElementaryQuad::from_net(a, 0, 0);
  std::mt19937_64 g(3);
  int two_roots = 0, draws = 0;
  double closure = 0, dspread = 0, pspread = 0;
  bool mates_ok = true;
  std::string err;
  for (; draws < 50; ++draws) {
    const Vec3 q0 = random_seed_point(a, k, g);
    try {
      const ClosurePencil pen = closure_roots(quad, q0);
      if (pen.roots.size() != 2) continue;
      ++two_roots;
      for (const Vec3& m : pen.root_normals) {
        const Propagation pr = propagate(a, {q0, m});
        closure = std::max(closure, pr.max_closure);
        const Report r = verify_mates(a, pr.net);
        mates_ok = mates_ok && r.passed();
        for (const auto& x : r.metrics) {
          if (x.name == "d-spread") dspread = std::max(dspread, x.value);
          if (x.name == "phi-spread") pspread = std::max(pspread, x.value);
        }
      }
    } catch (const GeometryError& e) {
      if (err.empty()) err = e.what();
    }
  }
  const bool pass = two_roots == 50 && closure < 1e-9 && mates_ok && dspread < 1e-9 && pspread < 1e-9;
  return {3, pass,
          fmt("5x5 pseudosphere patch, 50 seeds: %.0f with exactly 2 roots; max closure %.3g (tol 1e-9); "
              "d-spread %.3g, phi-spread %.3g (tol 1e-9)",
              two_roots, closure, dspread, pspread) +
              (mates_ok ? "" : "; verify_mates failed") + (err.empty() ? "" : "; first error: " + err)};
}

ElementaryQuad random_quad(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  const Vec3 c(n(g), n(g), n(g)), ax = random_unit(g);
  const Vec3 u = ax.unitOrthogonal(), v = ax.cross(u);
  const double r = uniform(g, 0.5, 2);
  std::array<Vec3, 4> p;
  double s = uniform(g, 0, 2 * kPi);
  for (auto& x : p) {
    x = c + r * (std::cos(s) * u + std::sin(s) * v);
    s += uniform(g, 0.3, 1.4);
  }
  return build_quad(p, random_unit(g));
}

Line criterion4() {
  std::mt19937_64 g(4);
  std::normal_distribution<double> n;
  double cross = 0;
  for (int it = 0; it < 100; ++it) {
    const Vec3 h(n(g), n(g), n(g));
    const PlueckerLine n0 = PlueckerLine::through(h, random_unit(g)), n1 = PlueckerLine::through(h, random_unit(g));
    const PlueckerLine m0 = PlueckerLine::through(Vec3(n(g), n(g), n(g)) * 2, random_unit(g));
    std::array<double, 4> lam{};
    for (auto& l : lam) l = uniform(g, -3, 3);
    cross = std::max(cross, projectivity_check(n0, n1, m0, lam).checks[0].residual);
  }

  // fixed parameters of eta: two real roots whose lines meet the circle axis
  int configs = 0, exact_two = 0;
  double meet = 0, match = 0;
  while (configs < 30) {
    const ElementaryQuad q = random_quad(g);
    const ContactElement& p0 = q[0];
    const Vec3 q0 = p0.p + uniform(g, 0.2, 1.0) * p0.n.unitOrthogonal();
    const Vec3 w = (q0 - p0.p).normalized();
    const PlueckerLine m0 = PlueckerLine::through(q0, detail::turn(p0.n, w, uniform(g, 0.3, 1.2)));
    const Circle c = q.circle();
    // rotated lines meet the axis where P + Q cos th + S sin th = 0
    const auto recip = [&](double th) {
      const PlueckerLine l = Motion::rotation(p0.normal_line(), th)(m0);
      return (c.center - l.point()).dot(l.direction().cross(c.axis));
    };
    const double P = 0.5 * (recip(0) + recip(kPi)), Q = 0.5 * (recip(0) - recip(kPi)), S = recip(kPi / 2) - P;
    if (P * P > 0.9 * (Q * Q + S * S)) continue;  // oracle has no or nearly double real roots
    Moebius eta;
    try {
      eta = eta_map(q, m0);
    } catch (const GeometryError&) {
      continue;
    }
    ++configs;
    const auto fq = eta.fixed_quadratic();  // fq[0] + fq[1] x + fq[2] x^2
    const double disc = fq[1] * fq[1] - 4 * fq[0] * fq[2];
    if (disc <= 0 || fq[2] == 0) continue;
    ++exact_two;
    std::array<double, 2> xs{(-fq[1] + std::sqrt(disc)) / (2 * fq[2]), (-fq[1] - std::sqrt(disc)) / (2 * fq[2])};
    // oracle roots of P + Q cos + S sin in th, as x = tan(th / 2): (P - Q) x^2 + 2 S x + (P + Q) = 0
    const double od = 4 * S * S - 4 * (P - Q) * (P + Q);
    std::array<double, 2> ox{(-2 * S + std::sqrt(od)) / (2 * (P - Q)), (-2 * S - std::sqrt(od)) / (2 * (P - Q))};
    for (double x : xs) {
      const double angle = 2 * std::atan(x);
      const PlueckerLine l = Motion::rotation(p0.normal_line(), angle)(m0);
      const auto cp = common_perpendicular(c.axis_line(), l);
      meet = std::max(meet, (cp.foot_m - cp.foot_n).norm() / c.radius);
      double best = 1e300;
      for (double y : ox) {
        const double d = std::abs(std::remainder(angle - 2 * std::atan(y), 2 * kPi));
        best = std::min(best, d);
      }
      match = std::max(match, best);
    }
  }
  const bool pass = cross < 1e-8 && exact_two == configs && meet < 1e-8 && match < 1e-8;
  return {4, pass,
          fmt("cross-ratio over 100 configurations: max rel residual %.3g (tol 1e-8); eta with 2 real fixed "
              "parameters in %.0f/%.0f configurations, fixed lines off the circle axis by %.3g",
              cross, exact_two, configs, meet) +
              fmt(", parameter mismatch vs oracle %.3g", match)};
}

Line criterion5() {
  const NetPatch a = pseudosphere_patch();
  const double k = constant_curvature(a);
  std::mt19937_64 g(5);
  double principal = 0, halfturn = 0;
  bool mates = true, special = true, passed = true;
  std::string err;
  for (int it = 0; it < 10; ++it) {
    const Vec3 q0 = random_seed_point(a, k, g);
    try {
      const auto ms = seed_normals(a.at(0, 0), q0, k);
      const NetPatch b = propagate(a, {q0, ms[0]}).net, c = propagate(a, {q0, ms[1]}).net;
      const Completion comp = complete_net(a, b, c);
      passed = passed && comp.report.passed();
      principal = std::max({principal, comp.report.max_residual("rotation-pair"), comp.report.max_residual("principal/")});
      mates = mates && comp.report.failures("mates-b/").empty() && comp.report.failures("mates-c/").empty();
      for (const auto& m : comp.report.metrics)
        if (m.name == "bennett-special") special = special && m.value == 1.0;
      for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
          const HalfTurn h = halfturn_axis(b.at(i, j), c.at(i, j));
          const ContactElement ha = a.at(i, j).transformed(h.motion);
          const ContactElement& d = comp.net.at(i, j);
          halfturn = std::max({halfturn, h.residual, (ha.p - d.p).norm(), (ha.n - d.n).norm()});
        }
    } catch (const GeometryError& e) {
      passed = false;
      if (err.empty()) err = e.what();
    }
  }
  const bool pass = passed && principal < 1e-8 && mates && halfturn < 1e-9 && special;
  return {5, pass,
          fmt("10 completed squares on a 5x5 patch: principality residual %.3g (tol 1e-8); half-turn residual %.3g "
              "(tol 1e-9)",
              principal, halfturn) +
              "; mates " + (mates ? "pass" : "fail") + "; special Bennett at every index " + (special ? "yes" : "no") +
              (err.empty() ? "" : "; first error: " + err)};
}

Line criterion6() {
  TractrixParams par;
  par.k = 12;
  par.d = 1;
  par.alpha = kPi / 2;
  par.rows = 12;
  par.cols = 10;
  const NetPatch net = tractrix_net(par);
  double lo = 1e300, hi = -1e300;
  for (int j = 0; j < net.cols; ++j) {
    const double l = tangent_segment_length(net.at(0, j));
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  double klo = 1e300, khi = -1e300;
  for (int i = 0; i + 1 < net.rows; ++i)
    for (int j = 0; j + 1 < net.cols; ++j) {
      const double kk = gaussian_curvature(ElementaryQuad::from_net(net, i, j));
      klo = std::min(klo, kk);
      khi = std::max(khi, kk);
    }
  const std::string obj = to_obj(net);
  int v = 0, f = 0;
  for (size_t pos = 0; pos < obj.size();) {
    const size_t end = obj.find('\n', pos);
    v += obj.compare(pos, 2, "v ") == 0;
    f += obj.compare(pos, 2, "f ") == 0;
    pos = end == std::string::npos ? obj.size() : end + 1;
  }
  const double kspread = (khi - klo) / std::abs(klo);
  const bool pass = hi - lo < 1e-9 && khi < 0 && kspread < 1e-8 && v == 120 && f == 99;
  return {6, pass,
          fmt("tractrix k=12 d=1: tangent length spread %.3g (tol 1e-9); K in [%.12g, %.12g], rel spread %.3g (tol 1e-8)",
              hi - lo, klo, khi, kspread) +
              fmt("; OBJ %.0f vertices, %.0f faces", v, f)};
}

Line criterion7() {
  int cases = 0, flagged = 0;
  double worst = 0;
  const auto run = [&](const ElementaryQuad& quad, const Vec3& q0) {
    const Circle c = quad.circle();
    const Vec3 w = q0 - quad[0].p;
    const Vec3 b = c.axis.dot(w) * (c.center - q0) + (q0 - c.center).dot(w) * c.axis;
    for (const Vec3& m : {Vec3(quad[0].n), Vec3(b.normalized())}) {
      const ClosureResult r = quad_closure(quad, {q0, m});
      ++cases;
      flagged += r.false_positive;
      worst = std::max(worst, r.residual);
    }
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RotQuadConfig cfg;
    cfg.seed = seed;
    RotQuadSampler s(cfg);
    const HomologousQuads h = homologous_quads(s.sample(), cfg);
    run(h.pn, h.qm[0].p);
  }
  const NetPatch a = pseudosphere_patch();
  std::mt19937_64 g(7);
  for (int it = 0; it < 10; ++it) run(ElementaryQuad::from_net(a, 0, 0), random_seed_point(a, constant_curvature(a), g));
  const bool pass = flagged == cases && worst < 1e-9;
  return {7, pass,
          fmt("M0 parallel to N0 and M0 meeting the circle axis: %.0f/%.0f flagged false positive; max closure "
              "residual %.3g",
              flagged, cases, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> expect;
  app.add_option("--expect-fail", expect, "criteria known to fail");
  CLI11_PARSE(app, argc, argv);

  const RotquadRun rq = rotquad_run();
  std::set<int> failed;
  for (const Line& l : {criterion1(rq), criterion2(rq), criterion3(), criterion4(), criterion5(), criterion6(),
                        criterion7()}) {
    print(l);
    if (!l.pass) failed.insert(l.id);
  }
  const std::set<int> expected(expect.begin(), expect.end());
  if (failed == expected) return 0;
  std::printf("failing set differs from expected\n");
  return 1;
}
