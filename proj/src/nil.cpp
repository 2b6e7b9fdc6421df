#include "nilray/nil.hpp"

#include <cmath>

namespace nilray {

NilPoint rotate_vertical(double theta, const NilPoint& p) {
  if (theta == 0.0) return p;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {p.x * c - p.y * s, p.x * s + p.y * c, p.z};
}

NilPoint apply_isometry(const NilIsometry& iso, const NilPoint& p) {
  return group_mul(iso.g, rotate_vertical(iso.theta, p));
}

Vec3 rotate_components(double theta, const Vec3& v) {
  if (theta == 0.0) return v;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {v.x * c - v.y * s, v.x * s + v.y * c, v.z};
}

NilTangent apply_isometry(const NilIsometry& iso, const NilTangent& v) {
  // Left translations fix left-invariant frame components; the rotation acts
  // on them as a euclidean rotation of (e1, e2).
  return {apply_isometry(iso, v.base), rotate_components(iso.theta, v.v)};
}

NilIsometry compose_isometry(const NilIsometry& a, const NilIsometry& b) {
  // Rotations are automorphisms of the group law, so
  // g1 R1 (g2 R2 p) = (g1 * R1 g2) R1R2 p.
  return {group_mul(a.g, rotate_vertical(a.theta, b.g)), a.theta + b.theta};
}

NilIsometry invert_isometry(const NilIsometry& a) {
  return {rotate_vertical(-a.theta, group_inv(a.g)), -a.theta};
}

NilTangent tangent_from_coordinate_velocity(const NilPoint& base, const Vec3& d) {
  // e1 = dx - (y/2) dz, e2 = dy + (x/2) dz, e3 = dz.
  return {base, {d.x, d.y, d.z + base.y * d.x / 2.0 - base.x * d.y / 2.0}};
}

Vec3 coordinate_velocity(const NilTangent& v) {
  const NilPoint& b = v.base;
  return {v.v.x, v.v.y, v.v.z - b.y * v.v.x / 2.0 + b.x * v.v.y / 2.0};
}

Mat3 metric_rot(const NilPoint& p) {
  // ds^2 = dx^2 + dy^2 + w^2 with w = dz + (y/2) dx - (x/2) dy.
  const Vec3 w{p.y / 2.0, -p.x / 2.0, 1.0};
  Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = (i == j && i < 2 ? 1.0 : 0.0) + w[i] * w[j];
  return g;
}

Mat3 metric_heis(const HeisPoint& p) {
  // ds^2 = dx^2 + dy^2 + (dz - x dy)^2.
  const Vec3 w{0.0, -p.x, 1.0};
  Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = (i == j && i < 2 ? 1.0 : 0.0) + w[i] * w[j];
  return g;
}

double metric_norm2(const NilPoint& base, const Vec3& d) { return dot(d, metric_rot(base) * d); }

}  // namespace nilray
