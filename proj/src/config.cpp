#include "nilray/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <memory>

#include "nilray/distance.hpp"
#include "nilray/quotient.hpp"

namespace nilray {

using nlohmann::json;

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected an array of 3 numbers");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

Color color(const json& j, const std::string& where) {
  const Vec3 v = vec3(j, where);
  return {v.x, v.y, v.z};
}

Mat3 matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 9) throw ConfigError(where + ": expected 9 numbers (row-major)");
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = number(j[3 * r + c], where);
  if (orthonormality_error(m) > 1e-6) throw ConfigError(where + ": frame is not orthonormal");
  if (m.determinant() < 0.0) throw ConfigError(where + ": frame is left-handed");
  return orthonormalize_columns(m);
}

void apply_march_keys(const json& j, MarchConfig& m, const std::string& where) {
  for (const auto& [key, v] : j.items()) {
    const std::string w = where + "." + key;
    if (key == "eps_hit") m.eps_hit = number(v, w);
    else if (key == "t_max") m.t_max = number(v, w);
    else if (key == "max_steps") m.max_steps = integer(v, w);
    else if (key == "min_step") m.min_step = number(v, w);
    else if (key == "supersample") m.supersample = boolean(v, w);
    else if (key == "threads") m.threads = integer(v, w);
    else throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

Background background(const json& j, const std::string& where) {
  if (j == "gradient") return Background::Gradient;
  if (j == "black") return Background::Black;
  throw ConfigError(where + ": expected \"gradient\" or \"black\"");
}

std::string object_label(const json& j, std::size_t index) {
  if (j.contains("name") && j["name"].is_string())
    return "object " + std::to_string(index) + " (\"" + j["name"].get<std::string>() + "\")";
  return "object " + std::to_string(index);
}

}  // namespace

NilPoint parse_chart_point(const json& j, const std::string& where) {
  only_keys(j, {"chart", "coords"}, where);
  if (!j.contains("chart")) throw ConfigError(where + ": missing \"chart\" (\"rot\" or \"heis\")");
  if (!j.contains("coords")) throw ConfigError(where + ": missing \"coords\"");
  const Vec3 c = vec3(j["coords"], where + ".coords");
  const json& chart = j["chart"];
  if (chart == "rot") return NilPoint::from(c);
  if (chart == "heis") return heis_to_rot({c.x, c.y, c.z});
  throw ConfigError(where + ".chart: expected \"rot\" or \"heis\"");
}

Mat3 look_at_frame(const NilPoint& p, const NilPoint& target, const Vec3& up) {
  const ShootResult s = inverse_exp(p, target);
  if (!s.ok() || s.t == 0.0) throw ConfigError("camera.look_at: cannot aim at the target");
  const Vec3 forward = s.direction().v;
  Vec3 right = cross(forward, up);
  if (norm(right) < 1e-9) right = cross(forward, Vec3{0.0, 1.0, 0.0});
  right = normalized(right);
  const Vec3 back = -forward;
  return Mat3::from_columns(right, cross(back, right), back);
}

SceneConfig parse_scene_config(const json& doc, const std::filesystem::path& base_dir, bool force_quotient) {
  only_keys(doc, {"objects", "lights", "camera", "march", "quotient", "output", "background", "ambient", "phong"},
            "config");
  SceneConfig cfg;
  Scene& scene = cfg.scene;

  if (doc.contains("quotient")) scene.quotient = boolean(doc["quotient"], "quotient");
  if (force_quotient) scene.quotient = true;
  if (doc.contains("background")) scene.background = background(doc["background"], "background");
  if (doc.contains("ambient")) scene.ambient = color(doc["ambient"], "ambient");
  if (doc.contains("phong")) {
    const json& p = doc["phong"];
    only_keys(p, {"ambient", "diffuse", "specular", "shininess"}, "phong");
    if (p.contains("ambient")) scene.phong.ambient = number(p["ambient"], "phong.ambient");
    if (p.contains("diffuse")) scene.phong.diffuse = number(p["diffuse"], "phong.diffuse");
    if (p.contains("specular")) scene.phong.specular = number(p["specular"], "phong.specular");
    if (p.contains("shininess")) scene.phong.shininess = number(p["shininess"], "phong.shininess");
  }

  if (!doc.contains("objects") || !doc["objects"].is_array())
    throw ConfigError("config: \"objects\" must be an array");
  const json& objects = doc["objects"];
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const json& o = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    only_keys(o, {"name", "center", "radius", "color", "texture", "orientation"}, where);
    if (!o.contains("center")) throw ConfigError(where + ": missing \"center\"");
    SceneObject obj;
    obj.center = parse_chart_point(o["center"], where + ".center");
    if (o.contains("radius")) obj.radius = number(o["radius"], where + ".radius");
    if (!(obj.radius > 0.0)) throw ConfigError(where + ".radius: must be positive");
    if (o.contains("color")) obj.color = color(o["color"], where + ".color");
    if (o.contains("orientation")) obj.orientation = matrix(o["orientation"], where + ".orientation");
    if (o.contains("texture")) {
      if (!o["texture"].is_string()) throw ConfigError(where + ".texture: expected a path");
      std::filesystem::path tex = o["texture"].get<std::string>();
      if (tex.is_relative()) tex = base_dir / tex;
      try {
        obj.texture = std::make_shared<const Image>(read_image(tex));
      } catch (const ImageError& e) {
        throw ConfigIoError(where + ".texture: " + e.what());
      }
    }
    scene.objects.push_back(std::move(obj));
  }

  if (doc.contains("lights")) {
    const json& lights = doc["lights"];
    if (!lights.is_array()) throw ConfigError("lights: expected an array");
    for (std::size_t i = 0; i < lights.size(); ++i) {
      const json& l = lights[i];
      const std::string where = "lights[" + std::to_string(i) + "]";
      only_keys(l, {"position", "color", "intensity"}, where);
      if (!l.contains("position")) throw ConfigError(where + ": missing \"position\"");
      Light light;
      light.position = parse_chart_point(l["position"], where + ".position");
      if (l.contains("color")) light.color = color(l["color"], where + ".color");
      if (l.contains("intensity")) light.intensity = number(l["intensity"], where + ".intensity");
      scene.lights.push_back(light);
    }
  }

  if (!doc.contains("camera")) throw ConfigError("config: missing \"camera\"");
  {
    const json& c = doc["camera"];
    only_keys(c, {"position", "look_at", "up", "frame", "fov"}, "camera");
    if (!c.contains("position")) throw ConfigError("camera: missing \"position\"");
    cfg.camera.p = parse_chart_point(c["position"], "camera.position");
    if (c.contains("look_at") && c.contains("frame"))
      throw ConfigError("camera: give either \"look_at\" or \"frame\", not both");
    if (c.contains("frame")) {
      cfg.camera.frame = matrix(c["frame"], "camera.frame");
    } else if (c.contains("look_at")) {
      const Vec3 up = c.contains("up") ? vec3(c["up"], "camera.up") : Vec3{0.0, 0.0, 1.0};
      cfg.camera.frame = look_at_frame(cfg.camera.p, parse_chart_point(c["look_at"], "camera.look_at"), up);
    }
    if (c.contains("fov")) cfg.march.fov_degrees = number(c["fov"], "camera.fov");
  }

  if (doc.contains("march")) apply_march_keys(doc["march"], cfg.march, "march");

  if (doc.contains("output")) {
    const json& o = doc["output"];
    only_keys(o, {"width", "height", "path"}, "output");
    if (o.contains("width")) cfg.march.width = integer(o["width"], "output.width");
    if (o.contains("height")) cfg.march.height = integer(o["height"], "output.height");
    if (o.contains("path")) {
      if (!o["path"].is_string()) throw ConfigError("output.path: expected a string");
      cfg.output = o["path"].get<std::string>();
    }
  }

  try {
    cfg.march.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("march: ") + e.what());
  }
  if (scene.quotient) {
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
      if (!in_domain(rot_to_heis(scene.objects[i].center)))
        throw ConfigError(object_label(objects[i], i) +
                          ": center lies outside the fundamental domain [0,1)^3 (Heisenberg chart)");
  }
  return cfg;
}

SceneConfig load_scene_config(const std::filesystem::path& path, bool force_quotient) {
  std::ifstream in(path);
  if (!in) throw ConfigIoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_scene_config(doc, path.parent_path(), force_quotient);
}

void apply_config_message(const json& msg, Scene& scene, MarchConfig& march) {
  Scene s = scene;
  MarchConfig m = march;
  for (const auto& [key, v] : msg.items()) {
    if (key == "type") continue;
    if (key == "width") m.width = integer(v, key);
    else if (key == "height") m.height = integer(v, key);
    else if (key == "fov") m.fov_degrees = number(v, key);
    else if (key == "max_steps") m.max_steps = integer(v, key);
    else if (key == "eps_hit") m.eps_hit = number(v, key);
    else if (key == "t_max") m.t_max = number(v, key);
    else if (key == "supersample") m.supersample = boolean(v, key);
    else if (key == "background") s.background = background(v, key);
    else if (key == "quotient") s.quotient = boolean(v, key);
    else throw ConfigError("config: unknown key \"" + key + "\"");
  }
  try {
    m.validate();
    if (s.quotient) validate_quotient_scene(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (m.width > 1024 || m.height > 1024) throw ConfigError("config: image larger than 1024x1024");
  scene = std::move(s);
  march = m;
}

}  // namespace nilray
