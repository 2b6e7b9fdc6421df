#pragma once

// Interactive session state machine behind `nilray serve`.
//
// Client messages (JSON text):
//   {"type":"move","v":[x,y,z],"t":s}
//   {"type":"rotate","axis":[x,y,z],"angle":r}
//   {"type":"config", ...march/display keys...}
// Each accepted command advances the sequence number once and produces a
// frame and a pose message carrying it. Anything malformed yields an error
// message and leaves the state untouched. See docs/protocol.md.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nilray/config.hpp"
#include "nilray/geodesic.hpp"
#include "nilray/march.hpp"
#include "nilray/scene.hpp"

namespace nilray {

struct SessionState {
  CameraState camera;
  Scene scene;
  MarchConfig march;
  std::uint64_t seq = 0;
};

using FrameRenderer = std::function<Image(const Scene&, const CameraState&, const MarchConfig&)>;

class Session {
 public:
  explicit Session(SessionState initial, FrameRenderer renderer = {});

  /// Frame and pose for the current state, without advancing it.
  std::vector<std::string> greet();

  /// Handles one client message and returns the replies in send order.
  std::vector<std::string> handle(const std::string& text);

  const SessionState& state() const { return state_; }

 private:
  std::vector<std::string> emit();

  SessionState state_;
  FrameRenderer renderer_;
};

nlohmann::json pose_message(const SessionState& s);
nlohmann::json error_message(const std::string& msg);

}  // namespace nilray
