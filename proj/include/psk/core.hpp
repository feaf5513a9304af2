#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace psk {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

// Tolerances shared by every predicate. `rel` scales with the magnitude of the
// quantities involved, `abs` applies to unit-normalized homogeneous vectors.
struct Tolerances {
  double rel = 1e-9;
  double abs = 1e-12;
  double curvature = 1e-8;  // relative, for curvature comparisons
  double twist = 1e-7;      // relative, for equal-twist hypotheses

  bool near_zero(double x, double scale = 1.0) const {
    return std::abs(x) <= rel * scale + abs;
  }
};

enum class ErrorCode {
  degenerate_input,
  parallel_case,
  parallel_planes,
  intersecting_lines,
  parallel_lines,
  skew_lines,
  non_invertible,
  not_a_rotation,
  line_in_quadric,
  tangent_line,
  degenerate_draw,
  not_concyclic,
  degenerate_circle,
  degenerate_quad,
  not_principal_pair,
  gamma_degenerate,
  q0_not_in_tangent_plane,
  curvature_incompatible,
  degenerate_seed,
  spurious_only,
  inconsistent_curvature,
  closure_violation,
  no_halfturn,
  twist_mismatch,
  inconsistent_inputs,
  format_error,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::degenerate_input: return "degenerate-input";
    case ErrorCode::parallel_case: return "parallel-case";
    case ErrorCode::parallel_planes: return "parallel-planes";
    case ErrorCode::intersecting_lines: return "intersecting-or-parallel";
    case ErrorCode::parallel_lines: return "parallel-lines";
    case ErrorCode::skew_lines: return "skew-lines";
    case ErrorCode::non_invertible: return "non-invertible";
    case ErrorCode::not_a_rotation: return "not-a-rotation";
    case ErrorCode::line_in_quadric: return "line-in-quadric";
    case ErrorCode::tangent_line: return "tangent-line";
    case ErrorCode::degenerate_draw: return "degenerate-draw";
    case ErrorCode::not_concyclic: return "not-concyclic";
    case ErrorCode::degenerate_circle: return "degenerate-circle";
    case ErrorCode::degenerate_quad: return "degenerate-quad";
    case ErrorCode::not_principal_pair: return "not-principal-pair";
    case ErrorCode::gamma_degenerate: return "gamma-degenerate";
    case ErrorCode::q0_not_in_tangent_plane: return "q0-not-in-tangent-plane";
    case ErrorCode::curvature_incompatible: return "curvature-incompatible";
    case ErrorCode::degenerate_seed: return "degenerate";
    case ErrorCode::spurious_only: return "spurious-only";
    case ErrorCode::inconsistent_curvature: return "inconsistent-curvature";
    case ErrorCode::closure_violation: return "closure-violation";
    case ErrorCode::no_halfturn: return "no-halfturn";
    case ErrorCode::twist_mismatch: return "twist-mismatch";
    case ErrorCode::inconsistent_inputs: return "inconsistent-inputs";
    case ErrorCode::format_error: return "format-error";
  }
  return "unknown";
}

class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorCode code, const std::string& detail = {})
      : std::runtime_error(detail.empty() ? std::string(error_name(code))
                                          : std::string(error_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Short scientific rendering for diagnostics.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Distance between two homogeneous vectors up to nonzero scale (sign included).
template <typename V>
double projective_distance(const V& a, const V& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return (na == nb) ? 0.0 : 1.0;
  const V ua = a / na, ub = b / nb;
  return std::min((ua - ub).norm(), (ua + ub).norm());
}

// Signed angle from u to v around the oriented axis w.
inline double signed_angle(const Vec3& u, const Vec3& v, const Vec3& w) {
  return std::atan2(u.cross(v).dot(w.normalized()), u.dot(v));
}

}  // namespace psk
