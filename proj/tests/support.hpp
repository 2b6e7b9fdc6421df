#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "nilray/nil.hpp"
#include "nilray/scene.hpp"

namespace nilray::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0x5eed);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline NilPoint random_point(double scale = 3.0) {
  return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
}

inline Vec3 random_unit() {
  std::normal_distribution<double> n;
  Vec3 v{n(rng()), n(rng()), n(rng())};
  return v / norm(v);
}

inline SceneObject sphere(const NilPoint& center, double radius) {
  SceneObject o;
  o.center = center;
  o.radius = radius;
  return o;
}

struct Component {
  int size = 0;
  double cx = 0.0;  // centroid
  double cy = 0.0;
  int first = -1;   // first pixel index in scan order
};

/// 4-connected components of mask pixels; `same` decides whether two adjacent
/// mask pixels belong together (default: always).
inline std::vector<Component> components(const std::vector<std::uint8_t>& mask, int w, int h,
                                         const std::function<bool(int, int)>& same = {}) {
  std::vector<int> label(mask.size(), -1);
  std::vector<Component> out;
  std::vector<int> stack;
  for (int s = 0; s < w * h; ++s) {
    if (!mask[s] || label[s] >= 0) continue;
    Component c;
    c.first = s;
    label[s] = static_cast<int>(out.size());
    stack.assign(1, s);
    while (!stack.empty()) {
      const int q = stack.back();
      stack.pop_back();
      ++c.size;
      c.cx += q % w;
      c.cy += q / w;
      const int x = q % w, y = q / w;
      const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& d : nb) {
        const int X = x + d[0], Y = y + d[1];
        if (X < 0 || Y < 0 || X >= w || Y >= h) continue;
        const int k = Y * w + X;
        if (mask[k] && label[k] < 0 && (!same || same(q, k))) {
          label[k] = label[s];
          stack.push_back(k);
        }
      }
    }
    c.cx /= c.size;
    c.cy /= c.size;
    out.push_back(c);
  }
  return out;
}

}  // namespace nilray::testing
