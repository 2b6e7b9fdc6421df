#pragma once

// JSON scene configuration. Every coordinate triple names its chart:
//   {"chart": "rot" | "heis", "coords": [x, y, z]}
// Unknown keys are rejected. See docs/scene-format.md.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "nilray/geodesic.hpp"
#include "nilray/march.hpp"
#include "nilray/scene.hpp"

namespace nilray {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a file named by the config (a texture) cannot be read.
class ConfigIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SceneConfig {
  Scene scene;
  CameraState camera;
  MarchConfig march;
  std::string output;  // empty when not given
};

/// Parses a config document. Relative texture paths resolve against base_dir.
/// force_quotient acts as if the document said "quotient": true.
SceneConfig parse_scene_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {},
                               bool force_quotient = false);

SceneConfig load_scene_config(const std::filesystem::path& path, bool force_quotient = false);

/// Applies the keys of a runtime "config" message (march and display
/// settings) to a copy of the state; throws ConfigError on unknown or invalid
/// keys, leaving the inputs untouched.
void apply_config_message(const nlohmann::json& msg, Scene& scene, MarchConfig& march);

/// Reads {"chart": ..., "coords": [...]} into the rotation-invariant chart.
NilPoint parse_chart_point(const nlohmann::json& j, const std::string& where);

/// Camera frame looking from p towards target with the given up hint (frame components).
Mat3 look_at_frame(const NilPoint& p, const NilPoint& target, const Vec3& up = {0.0, 0.0, 1.0});

}  // namespace nilray
