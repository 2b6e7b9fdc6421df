#pragma once

// Heisenberg group algebra for Nil geometry.
//
// Two charts are in use. The Heisenberg chart identifies the matrix
//   [1 x z; 0 1 y; 0 0 1]
// with (x, y, z) and carries the metric dx^2 + dy^2 + (dz - x dy)^2. The
// rotation-invariant chart replaces z by z - xy/2; there the metric becomes
//   dx^2 + dy^2 + (dz - (x dy - y dx)/2)^2
// and the vertical rotations are ordinary euclidean rotations about the
// z-axis. Everything inside the library works in the rotation-invariant chart;
// the Heisenberg chart only appears at I/O boundaries and in the quotient
// teleport.

#include <array>

#include "nilray/linalg.hpp"

namespace nilray {

/// Point in the rotation-invariant chart.
struct NilPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 coords() const { return {x, y, z}; }
  static constexpr NilPoint from(const Vec3& v) { return {v.x, v.y, v.z}; }
  constexpr bool operator==(const NilPoint&) const = default;
};

/// Point in the Heisenberg matrix chart.
struct HeisPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 coords() const { return {x, y, z}; }
  constexpr bool operator==(const HeisPoint&) const = default;
};

/// Tangent vector stored as components in the left-invariant orthonormal frame
/// (e1, e2, e3) at `base`. Because the frame is left-invariant these are also
/// the components of the vector translated back to the origin.
struct NilTangent {
  NilPoint base;
  Vec3 v;

  double norm() const { return nilray::norm(v); }
};

/// Orientation-preserving isometry p -> g * R_theta(p).
struct NilIsometry {
  NilPoint g;
  double theta = 0.0;

  static constexpr NilIsometry identity() { return {}; }
  static constexpr NilIsometry translation(const NilPoint& g) { return {g, 0.0}; }
};

constexpr NilPoint origin() { return {}; }

constexpr NilPoint heis_to_rot(const HeisPoint& p) { return {p.x, p.y, p.z - p.x * p.y / 2.0}; }
constexpr HeisPoint rot_to_heis(const NilPoint& p) { return {p.x, p.y, p.z + p.x * p.y / 2.0}; }

/// Group law in the rotation-invariant chart.
constexpr NilPoint group_mul(const NilPoint& p, const NilPoint& q) {
  return {p.x + q.x, p.y + q.y, p.z + q.z + (p.x * q.y - p.y * q.x) / 2.0};
}

constexpr NilPoint group_inv(const NilPoint& p) { return {-p.x, -p.y, -p.z}; }

/// Matrix product in the Heisenberg chart.
constexpr HeisPoint heis_mul(const HeisPoint& p, const HeisPoint& q) {
  return {p.x + q.x, p.y + q.y, p.z + q.z + p.x * q.y};
}

constexpr HeisPoint heis_inv(const HeisPoint& p) { return {-p.x, -p.y, -p.z + p.x * p.y}; }

NilPoint rotate_vertical(double theta, const NilPoint& p);

NilPoint apply_isometry(const NilIsometry& iso, const NilPoint& p);

/// Pushes a tangent vector forward by the differential of `iso`.
NilTangent apply_isometry(const NilIsometry& iso, const NilTangent& v);

NilIsometry compose_isometry(const NilIsometry& a, const NilIsometry& b);
NilIsometry invert_isometry(const NilIsometry& a);

/// Rotates the horizontal frame components (v1, v2) by theta; v3 is untouched.
Vec3 rotate_components(double theta, const Vec3& v);

/// Coordinate-chart velocity (dx, dy, dz) at `base` expressed in the frame.
NilTangent tangent_from_coordinate_velocity(const NilPoint& base, const Vec3& dxdydz);

/// Inverse of tangent_from_coordinate_velocity.
Vec3 coordinate_velocity(const NilTangent& v);

/// Metric tensor of the rotation-invariant chart at `p` (row-major 3x3).
Mat3 metric_rot(const NilPoint& p);

/// Metric tensor of the Heisenberg chart at `p`.
Mat3 metric_heis(const HeisPoint& p);

/// Squared length of a coordinate velocity under the rotation-invariant metric.
double metric_norm2(const NilPoint& base, const Vec3& dxdydz);

}  // namespace nilray
