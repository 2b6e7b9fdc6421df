#include "nilray/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace nilray {

SdfSample scene_sdf_nearest(const Scene& s, const NilPoint& p) {
  SdfSample best;
  if (s.objects.size() == 1) {
    const SceneObject& o = s.objects[0];
    return {conservative_distance(o.center, p) - o.radius, 0};
  }
  // Exact distances only for objects whose lower bound can still win.
  std::vector<std::pair<double, int>> order;
  order.reserve(s.objects.size());
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const SceneObject& o = s.objects[i];
    order.emplace_back(distance_lower_bound(group_mul(group_inv(o.center), p)) - o.radius,
                       static_cast<int>(i));
  }
  std::sort(order.begin(), order.end());
  for (const auto& [bound, i] : order) {
    if (bound >= best.value) break;
    const SceneObject& o = s.objects[static_cast<std::size_t>(i)];
    const double d = conservative_distance(o.center, p) - o.radius;
    if (d < best.value) best = {d, i};
  }
  return best;
}

NilTangent surface_normal(const Scene& s, const NilPoint& p) {
  return field_gradient_direction([&s](const NilPoint& q) { return scene_sdf(s, q); }, p);
}

Color surface_albedo(const SceneObject& obj, const NilPoint& p) {
  constexpr double pi = std::numbers::pi;
  const Vec3 rel = group_mul(group_inv(obj.center), p).coords();
  const Vec3 dir = obj.orientation.transposed() * rel;
  const double lon = std::atan2(dir.y, dir.x);
  const double lat = std::atan2(dir.z, std::hypot(dir.x, dir.y));
  const double u = (lon + pi) / (2.0 * pi);
  const double v = (pi / 2.0 - lat) / pi;

  if (obj.texture && obj.texture->width > 0 && obj.texture->height > 0) {
    const Image& tex = *obj.texture;
    const int i = std::clamp(static_cast<int>(u * tex.width), 0, tex.width - 1);
    const int j = std::clamp(static_cast<int>(v * tex.height), 0, tex.height - 1);
    return tex.get(i, j);
  }

  // 12 x 6 checker with darker meridians/parallels.
  const int ci = static_cast<int>(std::floor(u * 12.0));
  const int cj = static_cast<int>(std::floor(v * 6.0));
  const double checker = ((ci + cj) % 2 == 0) ? 1.0 : 0.7;
  const double fu = u * 12.0 - std::floor(u * 12.0);
  const double fv = v * 6.0 - std::floor(v * 6.0);
  const bool line = fu < 0.04 || fu > 0.96 || fv < 0.04 || fv > 0.96;
  return obj.color * (line ? 0.45 : checker);
}

}  // namespace nilray
