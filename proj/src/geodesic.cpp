#include "nilray/geodesic.hpp"

#include <array>
#include <cmath>

namespace nilray {

GeodesicParams GeodesicParams::from_tangent(const NilTangent& unit) {
  GeodesicParams g;
  g.a = std::hypot(unit.v.x, unit.v.y);
  g.c = unit.v.z;
  const double phase = g.a > 0.0 ? std::atan2(unit.v.y, unit.v.x) : 0.0;
  g.base = {unit.base, phase};
  return g;
}

NilPoint GeodesicParams::at(double t) const { return apply_isometry(base, exp_origin(a, c, t)); }

Vec3 GeodesicParams::velocity(double t) const {
  const double angle = base.theta + c * t;
  return {a * std::cos(angle), a * std::sin(angle), c};
}

NilPoint exp(const NilTangent& v, double t) {
  return group_mul(v.base, exp_vector(v.v * t));
}

Vec3 exp_velocity(const NilTangent& v, double t) {
  const double u = v.v.z * t;
  const double cu = std::cos(u);
  const double su = std::sin(u);
  return {v.v.x * cu - v.v.y * su, v.v.x * su + v.v.y * cu, v.v.z};
}

namespace {

using State = std::array<double, 6>;

State geodesic_rhs(const State& s) {
  const double x = s[0], y = s[1], v1 = s[3], v2 = s[4], v3 = s[5];
  return {v1, v2, v3 + (x * v2 - y * v1) / 2.0, -v2 * v3, v1 * v3, 0.0};
}

State axpy(const State& s, double h, const State& k) {
  State r;
  for (int i = 0; i < 6; ++i) r[i] = s[i] + h * k[i];
  return r;
}

// Right-hand side of V' = -nabla_{gamma'} V in frame components.
Vec3 transport_rhs(const Vec3& vel, const Vec3& V) {
  return {-0.5 * (vel.y * V.z + vel.z * V.y),
          0.5 * (vel.x * V.z + vel.z * V.x),
          -0.5 * (vel.x * V.y - vel.y * V.x)};
}

}  // namespace

OdeState integrate_geodesic(const NilTangent& v, double t, int steps) {
  State s{v.base.x, v.base.y, v.base.z, v.v.x, v.v.y, v.v.z};
  if (steps < 1) steps = 1;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const State k1 = geodesic_rhs(s);
    const State k2 = geodesic_rhs(axpy(s, h / 2, k1));
    const State k3 = geodesic_rhs(axpy(s, h / 2, k2));
    const State k4 = geodesic_rhs(axpy(s, h, k3));
    for (int j = 0; j < 6; ++j) s[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return {{s[0], s[1], s[2]}, {s[3], s[4], s[5]}};
}

Mat3 transport_frame(const Mat3& frame, const GeodesicParams& along, double t) {
  if (t == 0.0) return frame;
  const int steps = static_cast<int>(std::ceil(std::fabs(t) / kTransportStep));
  const double h = t / steps;
  Vec3 cols[3] = {frame.column(0), frame.column(1), frame.column(2)};
  for (int i = 0; i < steps; ++i) {
    const double s0 = i * h;
    const Vec3 vel0 = along.velocity(s0);
    const Vec3 velm = along.velocity(s0 + h / 2);
    const Vec3 vel1 = along.velocity(s0 + h);
    for (Vec3& V : cols) {
      const Vec3 k1 = transport_rhs(vel0, V);
      const Vec3 k2 = transport_rhs(velm, V + k1 * (h / 2));
      const Vec3 k3 = transport_rhs(velm, V + k2 * (h / 2));
      const Vec3 k4 = transport_rhs(vel1, V + k3 * h);
      V += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
  }
  return Mat3::from_columns(cols[0], cols[1], cols[2]);
}

NilTangent parallel_transport(const NilTangent& v0, const GeodesicParams& along, double t) {
  Mat3 m;
  m.set_column(0, v0.v);
  m.set_column(1, {});
  m.set_column(2, {});
  return {along.at(t), transport_frame(m, along, t).column(0)};
}

CameraState flow_state(const CameraState& s, const Vec3& v_local, double t) {
  const double speed = norm(v_local);
  if (t == 0.0 || speed == 0.0) return s;
  Vec3 dir = s.frame * v_local / speed;
  double length = t * speed;
  if (length < 0.0) {
    dir = -dir;
    length = -length;
  }
  const GeodesicParams geo = GeodesicParams::from_tangent({s.p, dir});
  CameraState out;
  out.p = geo.at(length);
  out.frame = orthonormalize_columns(transport_frame(s.frame, geo, length));
  return out;
}

CameraState rotate_camera(const CameraState& s, const Vec3& axis_local, double angle) {
  if (norm(axis_local) == 0.0) return s;
  return {s.p, orthonormalize_columns(s.frame * rotation_about(axis_local, angle))};
}

}  // namespace nilray
