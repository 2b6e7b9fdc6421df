// nilray: render, animate, probe and serve Nil scenes.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "nilray/config.hpp"
#include "nilray/kernels.hpp"
#include "nilray/march.hpp"
#include "nilray/probes.hpp"
#include "nilray/quotient.hpp"
#include "nilray/session.hpp"
#include "nilray/websocket.hpp"

namespace fs = std::filesystem;
using namespace nilray;

namespace {

constexpr int kConfigFailure = 1;
constexpr int kIoFailure = 2;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RenderFlags {
  std::string scene;
  std::string out;
  int width = 0;
  int height = 0;
  double fov = 0.0;
  int max_steps = 0;
  int threads = -1;
  bool quotient = false;
  bool supersample = false;
};

void add_render_flags(CLI::App* app, RenderFlags& f) {
  app->add_option("--scene", f.scene, "Scene config (JSON)")->required();
  app->add_option("--width", f.width, "Image width");
  app->add_option("--height", f.height, "Image height");
  app->add_option("--fov", f.fov, "Horizontal field of view in degrees");
  app->add_option("--max-steps", f.max_steps, "March step budget per ray");
  app->add_option("--threads", f.threads, "Render threads (0 = all cores)");
  app->add_flag("--quotient", f.quotient, "Render in the compact quotient");
  app->add_flag("--supersample", f.supersample, "4 samples per pixel");
}

SceneConfig load(const RenderFlags& f) {
  SceneConfig cfg = load_scene_config(f.scene, f.quotient);
  if (f.width > 0) cfg.march.width = f.width;
  if (f.height > 0) cfg.march.height = f.height;
  if (f.fov > 0.0) cfg.march.fov_degrees = f.fov;
  if (f.max_steps > 0) cfg.march.max_steps = f.max_steps;
  if (f.threads >= 0) cfg.march.threads = f.threads;
  if (f.supersample) cfg.march.supersample = true;
  try {
    cfg.march.validate();
    if (cfg.scene.quotient) validate_quotient_scene(cfg.scene);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

void write_or_fail(const fs::path& path, const Image& img) {
  try {
    write_image(path, img);
  } catch (const ImageError& e) {
    throw IoFailure(e.what());
  }
}

void print_stats(const RenderStats& s, const char* label) {
  std::printf("%s: pixels=%lld rays=%lld hit_rate=%.4f mean_steps=%.2f light_samples=%lld newton_failures=%lld teleports=%lld simd=%s\n",
              label, static_cast<long long>(s.pixels), static_cast<long long>(s.rays), s.hit_rate(), s.mean_steps(),
              static_cast<long long>(s.light_samples), static_cast<long long>(s.light_failures),
              static_cast<long long>(s.teleports), std::string(to_string(active_simd_level())).c_str());
}

int cmd_render(const RenderFlags& f) {
  const SceneConfig cfg = load(f);
  const std::string out = !f.out.empty() ? f.out : !cfg.output.empty() ? cfg.output : "out.ppm";
  const RenderResult r = render(cfg.scene, cfg.camera, cfg.march);
  write_or_fail(out, r.image);
  print_stats(r.stats, out.c_str());
  return 0;
}

struct Segment {
  Vec3 v;
  int frames;
};

std::vector<Segment> parse_path(const std::vector<std::string>& specs) {
  std::vector<Segment> out;
  for (const std::string& s : specs) {
    // "x,y,z:n"
    Segment seg{};
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream in(s);
    if (!(in >> seg.v.x >> c1 >> seg.v.y >> c2 >> seg.v.z >> c3 >> seg.frames) || c1 != ',' || c2 != ',' ||
        c3 != ':' || seg.frames < 0 || !in.eof())
      throw ConfigError("bad --move \"" + s + "\" (expected x,y,z:frames)");
    out.push_back(seg);
  }
  return out;
}

int cmd_animate(const RenderFlags& f, const std::vector<std::string>& moves, const std::string& ext) {
  const SceneConfig cfg = load(f);
  const std::vector<Segment> path = parse_path(moves);
  if (ext != "ppm" && ext != "png") throw ConfigError("--format must be ppm or png");
  const fs::path dir = f.out.empty() ? fs::path("frames") : fs::path(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());

  CameraState cam = cfg.camera;
  int index = 0;
  auto emit = [&] {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.%s", index++, ext.c_str());
    const RenderResult r = render(cfg.scene, cam, cfg.march);
    write_or_fail(dir / name, r.image);
    print_stats(r.stats, (dir / name).string().c_str());
  };
  emit();
  for (const Segment& s : path)
    for (int k = 0; k < s.frames; ++k) {
      cam = flow_state(cam, s.v, 1.0);
      emit();
    }
  return 0;
}

struct ProbeFlags {
  std::string kind;
  std::string out;
  double h_min = 0.5;
  double h_max = 20.0;
  int samples = 40;
  int c_samples = 2000;
  std::vector<double> heights{5.0, 10.0, 20.0, 40.0};
  double radius = 1.0;
  double a = 0.6;
  double c = 0.8;
  double t_max = 10.0;
  bool quotient = false;
  std::vector<double> start{0.5, 0.5, 0.5};
};

int cmd_probe(const ProbeFlags& f) {
  std::ostringstream csv;
  const probes::ShootGrid grid{f.c_samples};
  if (f.samples < 1 || f.c_samples < 4) throw ConfigError("--samples and --c-samples must be positive");
  if (f.kind == "conjugate") {
    const auto h_star = probes::first_conjugate_distance(grid, f.h_max);
    probes::write_conjugate_csv(csv, probes::conjugate_sweep(f.h_min, f.h_max, f.samples, grid), grid, h_star);
    std::fprintf(stderr, "h*=%.9f\n", h_star.value);
  } else if (f.kind == "shortcut") {
    const auto h0 = probes::vertical_shortcut_threshold(grid, f.h_max);
    probes::write_shortcut_csv(csv, probes::shortcut_sweep(f.h_min, f.h_max, f.samples, grid), grid, h0);
    std::fprintf(stderr, "h0=%.9f\n", h0.value);
  } else if (f.kind == "angular") {
    std::vector<probes::AngularRow> rows;
    const probes::AngularOptions opts;
    for (double h : f.heights) {
      if (!(h > f.radius && f.radius > 0)) throw ConfigError("angular probe needs h > r > 0");
      rows.push_back({h, f.radius, probes::angular_radius(h, f.radius, opts),
                      probes::euclidean_angular_radius(h, f.radius)});
    }
    probes::write_angular_csv(csv, rows, opts);
  } else if (f.kind == "geodesic-trace") {
    if (f.quotient) {
      if (f.start.size() != 3) throw ConfigError("--start needs 3 numbers");
      const double n = std::hypot(f.a, f.c);
      const NilTangent v{heis_to_rot({f.start[0], f.start[1], f.start[2]}), {f.a / n, 0.0, f.c / n}};
      probes::write_quotient_trace_csv(csv, probes::quotient_trace(v, f.t_max, f.samples));
    } else {
      if (std::fabs(f.a * f.a + f.c * f.c - 1.0) > 1e-9) throw ConfigError("geodesic-trace needs a^2 + c^2 = 1");
      probes::write_trace_csv(csv, probes::geodesic_trace(f.a, f.c, f.t_max, f.samples), f.a, f.c);
    }
  } else if (f.kind == "calibrate") {
    const probes::Calibration cal = probes::calibrate();
    csv << "# probe=calibrate\nc_v,L,newton_rate,T,grid_points,near_points\n"
        << cal.vertical_scale << ',' << cal.bilipschitz << ',' << cal.newton_rate << ',' << cal.near_threshold << ','
        << cal.grid_points << ',' << cal.near_points << '\n';
  } else {
    throw ConfigError("unknown probe kind \"" + f.kind + "\"");
  }
  if (f.out.empty() || f.out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream o(f.out, std::ios::binary);
    if (!(o << csv.str())) throw IoFailure("cannot write " + f.out);
  }
  return 0;
}

std::atomic<bool> g_interrupted{false};

int cmd_serve(const RenderFlags& f, int port) {
  const SceneConfig cfg = load(f);
  if (port < 0 || port > 65535) throw ConfigError("--port out of range");
  Session session({cfg.camera, cfg.scene, cfg.march, 0});
  ws::Server server(static_cast<std::uint16_t>(port));
  std::printf("serving on ws://127.0.0.1:%u/\n", server.port());
  std::fflush(stdout);
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  std::stop_source stop;
  std::jthread watcher([&stop](std::stop_token st) {
    while (!st.stop_requested() && !g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    stop.request_stop();
  });
  ws::Handler h{[&] { return session.greet(); }, [&](const std::string& m) { return session.handle(m); }};
  server.run(h, stop.get_token());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ray marching in Nil geometry"};
  app.require_subcommand(1);

  RenderFlags rf;
  auto* render_cmd = app.add_subcommand("render", "Render a still image");
  add_render_flags(render_cmd, rf);
  render_cmd->add_option("--out", rf.out, "Output image (.ppm or .png)");

  RenderFlags af;
  std::vector<std::string> moves;
  std::string format = "ppm";
  auto* animate_cmd = app.add_subcommand("animate", "Render frames along a flight path");
  add_render_flags(animate_cmd, af);
  animate_cmd->add_option("--out", af.out, "Output directory");
  animate_cmd->add_option("--move", moves, "Path segment x,y,z:frames (camera-local move per frame)");
  animate_cmd->add_option("--format", format, "ppm or png");

  ProbeFlags pf;
  auto* probe_cmd = app.add_subcommand("probe", "Geometric probes written as CSV");
  probe_cmd->add_option("kind", pf.kind, "conjugate | shortcut | angular | geodesic-trace | calibrate")->required();
  probe_cmd->add_option("--out", pf.out, "CSV path (default stdout)");
  probe_cmd->add_option("--h-min", pf.h_min);
  probe_cmd->add_option("--h-max", pf.h_max);
  probe_cmd->add_option("--samples", pf.samples);
  probe_cmd->add_option("--c-samples", pf.c_samples);
  probe_cmd->add_option("--heights", pf.heights, "Viewing heights (angular)");
  probe_cmd->add_option("--r", pf.radius, "Sphere radius (angular)");
  probe_cmd->add_option("--a", pf.a);
  probe_cmd->add_option("--c", pf.c);
  probe_cmd->add_option("--t-max", pf.t_max);
  probe_cmd->add_flag("--quotient", pf.quotient, "Trace through the quotient with lattice words");
  probe_cmd->add_option("--start", pf.start, "Start point, Heisenberg chart (quotient trace)")->expected(3);

  RenderFlags sf;
  int port = 8765;
  auto* serve_cmd = app.add_subcommand("serve", "Interactive session over WebSocket");
  add_render_flags(serve_cmd, sf);
  serve_cmd->add_option("--port", port, "TCP port (0 picks one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigFailure;
  }

  try {
    if (*render_cmd) return cmd_render(rf);
    if (*animate_cmd) return cmd_animate(af, moves, format);
    if (*probe_cmd) return cmd_probe(pf);
    if (*serve_cmd) return cmd_serve(sf, port);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigFailure;
  } catch (const ConfigIoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoFailure;
  } catch (const IoFailure& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoFailure;
  } catch (const ws::SocketError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigFailure;
  }
  return 0;
}
