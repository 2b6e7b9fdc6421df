#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nilray/distance.hpp"
#include "nilray/image.hpp"
#include "nilray/linalg.hpp"
#include "nilray/nil.hpp"

namespace nilray {

struct SceneObject {
  NilPoint center;
  double radius = 1.0;
  Color color{0.8, 0.8, 0.8};
  /// Equirectangular texture; when empty a latitude/longitude grid over
  /// `color` is used.
  std::shared_ptr<const Image> texture;
  /// Columns are the object's texture axes in frame components at its center.
  Mat3 orientation = Mat3::identity();
};

struct Light {
  NilPoint position;
  Color color{1.0, 1.0, 1.0};
  double intensity = 1.0;
};

struct PhongParams {
  double ambient = 0.1;
  double diffuse = 0.7;
  double specular = 0.2;
  double shininess = 32.0;
};

enum class Background { Gradient, Black };

struct Scene {
  std::vector<SceneObject> objects;
  std::vector<Light> lights;
  Color ambient{1.0, 1.0, 1.0};
  PhongParams phong;
  Background background = Background::Gradient;
  bool quotient = false;
};

struct SdfSample {
  double value = std::numeric_limits<double>::infinity();
  int object = -1;
};

/// min over objects of (conservative distance to the center) - radius.
SdfSample scene_sdf_nearest(const Scene& s, const NilPoint& p);

inline double scene_sdf(const Scene& s, const NilPoint& p) { return scene_sdf_nearest(s, p).value; }

class DegenerateGradient : public std::runtime_error {
 public:
  DegenerateGradient() : std::runtime_error("scene sdf gradient vanishes") {}
};

/// Step of the central differences used for normals.
inline constexpr double kNormalStep = 1e-4;

/// Unit gradient of scene_sdf at p from central differences along e1, e2, e3.
/// Throws DegenerateGradient when the gradient norm is below 1e-8.
NilTangent surface_normal(const Scene& s, const NilPoint& p);

/// Same as above for an arbitrary field.
template <class Field>
NilTangent field_gradient_direction(const Field& f, const NilPoint& p) {
  Vec3 grad;
  for (int k = 0; k < 3; ++k) {
    Vec3 step{};
    step[k] = kNormalStep;
    const double fp = f(group_mul(p, NilPoint::from(step)));
    const double fm = f(group_mul(p, NilPoint::from(-step)));
    grad[k] = (fp - fm) / (2.0 * kNormalStep);
  }
  const double n = norm(grad);
  if (!(n >= 1e-8)) throw DegenerateGradient();
  return {p, grad / n};
}

/// Surface color of object `obj` at point p (on or near its surface).
Color surface_albedo(const SceneObject& obj, const NilPoint& p);

}  // namespace nilray
