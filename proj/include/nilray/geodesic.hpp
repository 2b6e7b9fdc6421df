#pragma once

// Geodesic flow of Nil.
//
// In frame components the geodesic equation reduces to
//   v1' = -v2 v3,  v2' = v1 v3,  v3' = 0,
// so the horizontal velocity turns at rate c = v3 while
//   x' = v1, y' = v2, z' = v3 + (x v2 - y v1)/2.
// From the origin with initial components (a, 0, c) and u = c t this integrates to
//   x = (2a/c) sin(u/2) cos(u/2),  y = (2a/c) sin^2(u/2),
//   z = u + (a^2 / 2c^2) (u - sin u).
// With w = t (a, 0, c) the same point is (w1 + i w2)(S(u) + i C(u)) horizontally and
// u + |w_h|^2 K(u) / 2 vertically, where u = w3 and S, C, K are the entire
// functions below; that form is smooth through c = 0 and is what the code uses.

#include <cmath>

#include "nilray/linalg.hpp"
#include "nilray/nil.hpp"

namespace nilray {

namespace series {

// Below this |u| the Taylor branches are used.
inline constexpr double kCrossover = 0.1;

/// sin(u)/u
inline double sinc(double u) {
  if (std::fabs(u) < kCrossover) {
    const double u2 = u * u;
    return 1.0 + u2 * (-1.0 / 6 + u2 * (1.0 / 120 + u2 * (-1.0 / 5040 + u2 * (1.0 / 362880 + u2 * (-1.0 / 39916800)))));
  }
  return std::sin(u) / u;
}

/// (1 - cos u)/u
inline double cosc(double u) {
  if (std::fabs(u) < kCrossover) {
    const double u2 = u * u;
    return u * (1.0 / 2 + u2 * (-1.0 / 24 + u2 * (1.0 / 720 + u2 * (-1.0 / 40320 + u2 * (1.0 / 3628800 + u2 * (-1.0 / 479001600))))));
  }
  const double s = std::sin(u / 2.0);
  return 2.0 * s * s / u;
}

/// (u - sin u)/u^2
inline double sinc_defect(double u) {
  if (std::fabs(u) < kCrossover) {
    const double u2 = u * u;
    return u * (1.0 / 6 + u2 * (-1.0 / 120 + u2 * (1.0 / 5040 + u2 * (-1.0 / 362880 + u2 * (1.0 / 39916800 + u2 * (-1.0 / 6227020800.0))))));
  }
  return (u - std::sin(u)) / (u * u);
}

}  // namespace series

/// exp at the origin of the (unnormalized) tangent w.
inline NilPoint exp_vector(const Vec3& w) {
  const double u = w.z;
  const double s = series::sinc(u);
  const double c = series::cosc(u);
  const double h2 = w.x * w.x + w.y * w.y;
  return {w.x * s - w.y * c, w.x * c + w.y * s, u + 0.5 * h2 * series::sinc_defect(u)};
}

/// Point at arclength t along the unit geodesic from the origin with initial
/// frame components (a, 0, c).
inline NilPoint exp_origin(double a, double c, double t) { return exp_vector({a * t, 0.0, c * t}); }

/// Unit-speed geodesic: initial components (a, 0, c) rotated by base.theta,
/// then carried by the isometry `base`.
struct GeodesicParams {
  double a = 0.0;
  double c = 1.0;
  NilIsometry base;

  /// Reduces a unit tangent to (a, 0, c) plus a vertical rotation and a translation.
  static GeodesicParams from_tangent(const NilTangent& unit);

  double phase() const { return base.theta; }
  NilPoint at(double t) const;
  /// Frame components of the velocity at arclength t.
  Vec3 velocity(double t) const;
  NilTangent tangent(double t) const { return {at(t), velocity(t)}; }
};

/// Point at arclength t along the geodesic with unit initial tangent v.
NilPoint exp(const NilTangent& v, double t);

/// Velocity components at arclength t along the geodesic with unit initial tangent v.
Vec3 exp_velocity(const NilTangent& v, double t);

struct OdeState {
  NilPoint p;
  Vec3 v;
};

/// Fixed-step RK4 integration of the geodesic equation in frame components.
/// Independent of the closed form; used as an oracle.
OdeState integrate_geodesic(const NilTangent& v, double t, int steps);

inline NilPoint geodesic_ode(const NilTangent& v, double t, int steps) {
  return integrate_geodesic(v, t, steps).p;
}

/// Maximum arclength per RK4 step used by parallel transport.
inline constexpr double kTransportStep = 1e-2;

/// Parallel transport of v0 (based at along.at(0)) to along.at(t).
NilTangent parallel_transport(const NilTangent& v0, const GeodesicParams& along, double t);

/// Transports each column of `frame` (components at the origin representation).
Mat3 transport_frame(const Mat3& frame, const GeodesicParams& along, double t);

/// Position and orientation of an observer. The columns of `frame` are the
/// frame components of the observer's (e1, e2, e3): right, up and backwards.
struct CameraState {
  NilPoint p;
  Mat3 frame = Mat3::identity();
};

/// Moves along the geodesic in direction frame * v_local for arclength
/// t * |v_local| and parallel-transports the frame.
CameraState flow_state(const CameraState& s, const Vec3& v_local, double t);

/// Rotates the frame about an axis given in camera-local coordinates.
CameraState rotate_camera(const CameraState& s, const Vec3& axis_local, double angle);

}  // namespace nilray
