#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "nilray/geodesic.hpp"
#include "nilray/image.hpp"
#include "nilray/lattice.hpp"
#include "nilray/scene.hpp"

namespace nilray {

struct MarchConfig {
  double eps_hit = 1e-4;
  double t_max = 50.0;
  int max_steps = 256;
  double min_step = 1e-5;
  double fov_degrees = 90.0;
  int width = 64;
  int height = 64;
  bool supersample = false;
  /// 0 picks std::thread::hardware_concurrency().
  int threads = 0;

  void validate() const;
};

struct Hit {
  double t = 0.0;
  NilPoint point;
  int object = -1;
  NilTangent incoming;
  int steps_used = 0;
  /// Lattice word taking the object to the image that was hit in the
  /// universal cover (as seen from the camera): copy word, then the inverse of
  /// the teleports. Empty outside quotient mode.
  LatticeWord lattice_word;
  /// Quotient mode: integer Heisenberg element of the object copy that was hit,
  /// in fundamental-domain coordinates.
  HeisPoint copy_element;
  int teleports = 0;
};

struct Miss {
  double t = 0.0;
  int steps_used = 0;
  /// Unit tangent where marching stopped.
  NilTangent final_tangent;
  /// Teleports applied to the ray (quotient mode).
  LatticeWord lattice_word;
  int teleports = 0;
};

using MarchOutcome = std::variant<Hit, Miss>;

/// Unit tangent through the center of pixel (i, j) (column i, row j from the
/// top). Camera looks down -e3 with e1 right and e2 up; fov spans the width.
NilTangent pixel_to_tangent(const CameraState& cam, int i, int j, const MarchConfig& cfg);

/// Same with a sub-pixel offset in [0,1)^2 instead of the pixel center.
NilTangent pixel_to_tangent(const CameraState& cam, double i, double j, const MarchConfig& cfg);

/// Sphere tracing along the closed-form geodesic, starting at arclength t_start.
MarchOutcome march(const Scene& s, const NilTangent& v, const MarchConfig& cfg,
                   double t_start = 0.0);

struct ShadeStats {
  int light_samples = 0;
  int light_failures = 0;
  int shadowed = 0;
};

/// Phong shading with shortest geodesics to the lights and a shadow march.
Color shade(const Scene& s, const Hit& h, const MarchConfig& cfg, ShadeStats* stats = nullptr);

/// Background color for a ray that escaped.
Color background_color(const Scene& s, const Miss& m);

struct RenderStats {
  std::int64_t pixels = 0;
  std::int64_t rays = 0;
  std::int64_t hits = 0;
  std::int64_t steps = 0;
  std::int64_t light_samples = 0;
  std::int64_t light_failures = 0;
  std::int64_t teleports = 0;

  double hit_rate() const { return rays ? static_cast<double>(hits) / rays : 0.0; }
  double mean_steps() const { return rays ? static_cast<double>(steps) / rays : 0.0; }
};

struct RenderResult {
  Image image;
  /// Per pixel (center sample): 1 where the ray hit an object.
  std::vector<std::uint8_t> hit_mask;
  /// Per pixel: object index or -1.
  std::vector<int> object_id;
  /// Per pixel: lattice element of the hit image (identity outside quotient mode).
  std::vector<HeisPoint> lattice_element;
  RenderStats stats;
};

/// Renders the scene; output is identical for any thread count.
RenderResult render(const Scene& s, const CameraState& cam, const MarchConfig& cfg);

}  // namespace nilray
