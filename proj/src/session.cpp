#include "nilray/session.hpp"

#include <cmath>
#include <exception>

namespace nilray {

using nlohmann::json;

namespace {

Vec3 vec3_field(const json& msg, const char* key) {
  if (!msg.contains(key)) throw ConfigError(std::string("missing \"") + key + "\"");
  const json& a = msg[key];
  if (!a.is_array() || a.size() != 3) throw ConfigError(std::string("\"") + key + "\" must be 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!a[i].is_number()) throw ConfigError(std::string("\"") + key + "\" must be 3 numbers");
    v[i] = a[i].get<double>();
    if (!std::isfinite(v[i])) throw ConfigError(std::string("\"") + key + "\" is not finite");
  }
  return v;
}

double number_field(const json& msg, const char* key) {
  if (!msg.contains(key) || !msg[key].is_number())
    throw ConfigError(std::string("\"") + key + "\" must be a number");
  const double v = msg[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string("\"") + key + "\" is not finite");
  return v;
}

void only(const json& msg, std::initializer_list<const char*> keys) {
  for (const auto& [k, _] : msg.items()) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown key \"" + k + "\"");
  }
}

}  // namespace

json pose_message(const SessionState& s) {
  json frame = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) frame.push_back(s.camera.frame(r, c));
  return {{"type", "pose"},
          {"seq", s.seq},
          {"p", {s.camera.p.x, s.camera.p.y, s.camera.p.z}},
          {"chart", "rot"},
          {"frame", frame}};
}

json error_message(const std::string& msg) { return {{"type", "error"}, {"msg", msg}}; }

Session::Session(SessionState initial, FrameRenderer renderer)
    : state_(std::move(initial)), renderer_(std::move(renderer)) {
  if (!renderer_)
    renderer_ = [](const Scene& s, const CameraState& c, const MarchConfig& m) { return render(s, c, m).image; };
}

std::vector<std::string> Session::emit() {
  std::vector<std::string> out;
  try {
    const Image img = renderer_(state_.scene, state_.camera, state_.march);
    out.push_back(json{{"type", "frame"}, {"seq", state_.seq}, {"png", base64_encode(encode_png(img))}}.dump());
  } catch (const std::exception& e) {
    json err = error_message(std::string("render failed: ") + e.what());
    err["seq"] = state_.seq;
    out.push_back(err.dump());
  }
  out.push_back(pose_message(state_).dump());
  return out;
}

std::vector<std::string> Session::greet() { return emit(); }

std::vector<std::string> Session::handle(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    return {error_message("malformed JSON").dump()};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
    return {error_message("message needs a string \"type\"").dump()};

  const std::string type = msg["type"].get<std::string>();
  try {
    if (type == "move") {
      only(msg, {"type", "v", "t"});
      const Vec3 v = vec3_field(msg, "v");
      const double t = number_field(msg, "t");
      state_.camera = flow_state(state_.camera, v, t);
    } else if (type == "rotate") {
      only(msg, {"type", "axis", "angle"});
      const Vec3 axis = vec3_field(msg, "axis");
      const double angle = number_field(msg, "angle");
      if (norm(axis) == 0.0) throw ConfigError("rotation axis is zero");
      state_.camera = rotate_camera(state_.camera, axis, angle);
    } else if (type == "config") {
      apply_config_message(msg, state_.scene, state_.march);
    } else {
      return {error_message("unknown message type \"" + type + "\"").dump()};
    }
  } catch (const ConfigError& e) {
    return {error_message(e.what()).dump()};
  }
  ++state_.seq;
  return emit();
}

}  // namespace nilray
