#pragma once

#include <numbers>

#include "psk/backlund.hpp"

namespace psk {

// i is the angular index (k steps per turn), j the height.
struct TractrixParams {
  int k = 12;
  double d = 1.0;
  double alpha = std::numbers::pi / 2;
  int rows = 12;
  int cols = 10;

  void validate() const {
    if (k < 3) throw GeometryError(ErrorCode::degenerate_input, "k must be at least 3");
    if (rows < 1 || cols < 1) throw GeometryError(ErrorCode::degenerate_input, "empty patch");
    if (!(d > 0)) throw GeometryError(ErrorCode::degenerate_input, "d must be positive");
  }
};

// Points on the z-axis, radial normals. Quad curvature is undefined on this net.
inline NetPatch axis_net(const TractrixParams& par) {
  par.validate();
  NetPatch net(par.rows, par.cols);
  for (int i = 0; i < par.rows; ++i) {
    const double a = 2.0 * std::numbers::pi * i / par.k;
    for (int j = 0; j < par.cols; ++j) net.at(i, j) = {Vec3(0, 0, j), Vec3(std::cos(a), std::sin(a), 0)};
  }
  return net;
}

inline ContactElement tractrix_seed(const TractrixParams& par) {
  return {Vec3(0, par.d, 0), Vec3(0, std::cos(par.alpha), std::sin(par.alpha))};
}

// Backlund mate of the axis net seeded at (0, d, 0); a discrete pseudosphere of revolution.
inline Propagation tractrix_propagation(const TractrixParams& par, const Tolerances& tol = {}) {
  PropagateOptions opt;
  opt.degenerate_source = true;
  opt.tol = tol;
  return propagate(axis_net(par), tractrix_seed(par), opt);
}

inline NetPatch tractrix_net(const TractrixParams& par, const Tolerances& tol = {}) {
  return tractrix_propagation(par, tol).net;
}

// Distance from q along its tangent line (in the meridian plane x = 0) to the z-axis.
inline double tangent_segment_length(const ContactElement& q) {
  // tangent direction in the meridian plane: perpendicular to m within x = 0
  const Vec3 t = Vec3::UnitX().cross(q.n);
  if (std::abs(t.y()) <= 1e-300) throw GeometryError(ErrorCode::parallel_case, "tangent parallel to the axis");
  const double s = -q.p.y() / t.y();
  return (s * t).norm();
}

}  // namespace psk
