#include "nilray/march.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "nilray/quotient.hpp"

namespace nilray {

void MarchConfig::validate() const {
  if (!(eps_hit > 0.0)) throw std::invalid_argument("eps_hit must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (!(min_step > 0.0)) throw std::invalid_argument("min_step must be positive");
  if (!(fov_degrees > 0.0 && fov_degrees < 180.0))
    throw std::invalid_argument("fov must be in (0, 180) degrees");
  if (width < 1 || height < 1) throw std::invalid_argument("image size must be positive");
}

NilTangent pixel_to_tangent(const CameraState& cam, double i, double j, const MarchConfig& cfg) {
  const double half = std::tan(cfg.fov_degrees * std::numbers::pi / 360.0);
  const double u = (2.0 * i / cfg.width - 1.0) * half;
  const double v = (1.0 - 2.0 * j / cfg.height) * half * cfg.height / cfg.width;
  const Vec3 d = cam.frame.column(0) * u + cam.frame.column(1) * v - cam.frame.column(2);
  return {cam.p, normalized(d)};
}

NilTangent pixel_to_tangent(const CameraState& cam, int i, int j, const MarchConfig& cfg) {
  return pixel_to_tangent(cam, i + 0.5, j + 0.5, cfg);
}

MarchOutcome march(const Scene& s, const NilTangent& v, const MarchConfig& cfg, double t_start) {
  double t = t_start;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const NilPoint p = exp(v, t);
    const SdfSample smp = scene_sdf_nearest(s, p);
    if (smp.value < cfg.eps_hit) {
      Hit h;
      h.t = t;
      h.point = p;
      h.object = smp.object;
      h.incoming = {p, exp_velocity(v, t)};
      h.steps_used = step + 1;
      return h;
    }
    t += std::fmax(smp.value, cfg.min_step);
    if (t > cfg.t_max) {
      const double t_end = std::fmin(t, cfg.t_max);
      return Miss{t_end, step + 1, {exp(v, t_end), exp_velocity(v, t_end)}, {}};
    }
  }
  return Miss{t, cfg.max_steps, {exp(v, t), exp_velocity(v, t)}, {}};
}

Color shade(const Scene& s, const Hit& h, const MarchConfig& cfg, ShadeStats* stats) {
  const SceneObject& obj = s.objects.at(static_cast<std::size_t>(h.object));
  const Color albedo = surface_albedo(obj, h.point);
  Color out = albedo * s.ambient * s.phong.ambient;
  if (s.lights.empty()) return clamp01(out);

  Vec3 n;
  try {
    n = surface_normal(s, h.point).v;
  } catch (const DegenerateGradient&) {
    n = -h.incoming.v;
  }
  const Vec3 view = -h.incoming.v;

  for (const Light& light : s.lights) {
    if (stats) ++stats->light_samples;
    const ShootResult geo = inverse_exp(h.point, light.position);
    if (!geo.ok()) {
      if (stats) ++stats->light_failures;
      continue;
    }
    if (geo.t == 0.0) continue;
    const Vec3 l = geo.direction().v;
    const double ndl = dot(n, l);
    if (ndl <= 0.0) continue;

    // Leave the surface before looking for occluders.
    MarchConfig shadow = cfg;
    shadow.t_max = geo.t;
    const double t_start = std::fmin(0.05, 4.0 * cfg.eps_hit / std::fmax(ndl, 1e-3));
    if (t_start < geo.t) {
      const MarchOutcome occ = march(s, {h.point, l}, shadow, t_start);
      if (std::holds_alternative<Hit>(occ)) {
        if (stats) ++stats->shadowed;
        continue;
      }
    }

    const Vec3 r = n * (2.0 * ndl) - l;
    const double spec = std::pow(std::fmax(dot(r, view), 0.0), s.phong.shininess);
    const Color lc = light.color * light.intensity;
    out = out + lc * (albedo * (s.phong.diffuse * ndl) + Color{1, 1, 1} * (s.phong.specular * spec));
  }
  return clamp01(out);
}

Color background_color(const Scene& s, const Miss& m) {
  if (s.background == Background::Black) return {};
  const Vec3 d = normalized(m.final_tangent.v);
  const double band = 0.5 + 0.5 * std::sin(6.0 * std::atan2(d.y, d.x) + 4.0 * d.z);
  return {0.08 + 0.10 * (d.x + 1.0) + 0.04 * band, 0.08 + 0.08 * (d.y + 1.0) + 0.04 * band,
          0.20 + 0.15 * (d.z + 1.0)};
}

namespace {

struct Sample {
  Color color;
  bool hit = false;
  int object = -1;
  HeisPoint element;
};

// Lights and the hit copy moved into the frame of the hit image.
Scene local_scene(const Scene& s, const Hit& h, const HeisPoint& element) {
  const NilPoint g = heis_to_rot(element);
  Scene local = s;
  local.quotient = false;
  local.objects = {s.objects.at(static_cast<std::size_t>(h.object))};
  local.objects[0].center = group_mul(g, local.objects[0].center);
  for (Light& l : local.lights) l.position = group_mul(g, l.position);
  return local;
}

Sample trace(const Scene& s, const NilTangent& v, const MarchConfig& cfg, RenderStats& st) {
  Sample out;
  ++st.rays;
  const MarchOutcome r = s.quotient ? march_quotient(s, v, cfg) : march(s, v, cfg);
  if (const Hit* h = std::get_if<Hit>(&r)) {
    ++st.hits;
    st.steps += h->steps_used;
    ShadeStats ss;
    if (s.quotient) {
      st.teleports += h->teleports;
      out.element = word_element(h->lattice_word);
      // Shade in the domain frame against the lattice copy that was hit.
      const Scene local = local_scene(s, *h, h->copy_element);
      Hit shaded = *h;
      shaded.object = 0;
      out.color = shade(local, shaded, cfg, &ss);
    } else {
      out.color = shade(s, *h, cfg, &ss);
    }
    st.light_samples += ss.light_samples;
    st.light_failures += ss.light_failures;
    out.hit = true;
    out.object = h->object;
  } else {
    const Miss& m = std::get<Miss>(r);
    st.steps += m.steps_used;
    st.teleports += m.teleports;
    out.color = background_color(s, m);
  }
  return out;
}

}  // namespace

RenderResult render(const Scene& s, const CameraState& cam, const MarchConfig& cfg) {
  cfg.validate();
  if (s.quotient) validate_quotient_scene(s);
  RenderResult res;
  res.image = Image(cfg.width, cfg.height);
  const std::size_t npix = static_cast<std::size_t>(cfg.width) * cfg.height;
  res.hit_mask.assign(npix, 0);
  res.object_id.assign(npix, -1);
  res.lattice_element.assign(npix, HeisPoint{});

  constexpr int kTile = 16;
  const int tiles_x = (cfg.width + kTile - 1) / kTile;
  const int tiles_y = (cfg.height + kTile - 1) / kTile;
  const int ntiles = tiles_x * tiles_y;
  std::vector<RenderStats> tile_stats(static_cast<std::size_t>(ntiles));
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (int tile = next.fetch_add(1); tile < ntiles; tile = next.fetch_add(1)) {
      RenderStats& st = tile_stats[static_cast<std::size_t>(tile)];
      const int x0 = (tile % tiles_x) * kTile;
      const int y0 = (tile / tiles_x) * kTile;
      for (int j = y0; j < std::min(y0 + kTile, cfg.height); ++j) {
        for (int i = x0; i < std::min(x0 + kTile, cfg.width); ++i) {
          const std::size_t k = static_cast<std::size_t>(j) * cfg.width + i;
          ++st.pixels;
          if (!cfg.supersample) {
            const Sample smp = trace(s, pixel_to_tangent(cam, i, j, cfg), cfg, st);
            res.image.set(i, j, smp.color);
            res.hit_mask[k] = smp.hit ? 1 : 0;
            res.object_id[k] = smp.object;
            res.lattice_element[k] = smp.element;
            continue;
          }
          Color acc;
          int hits = 0;
          Sample first_hit;
          for (int sub = 0; sub < 4; ++sub) {
            const double di = (sub % 2) ? 0.75 : 0.25;
            const double dj = (sub / 2) ? 0.75 : 0.25;
            const Sample smp = trace(s, pixel_to_tangent(cam, i + di, j + dj, cfg), cfg, st);
            acc = acc + smp.color * 0.25;
            if (smp.hit && hits++ == 0) first_hit = smp;
          }
          res.image.set(i, j, acc);
          res.hit_mask[k] = hits >= 2 ? 1 : 0;
          res.object_id[k] = hits >= 2 ? first_hit.object : -1;
          res.lattice_element[k] = hits >= 2 ? first_hit.element : HeisPoint{};
        }
      }
    }
  };

  int nthreads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::clamp(nthreads, 1, std::max(1, ntiles));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  for (const RenderStats& st : tile_stats) {
    res.stats.pixels += st.pixels;
    res.stats.rays += st.rays;
    res.stats.hits += st.hits;
    res.stats.steps += st.steps;
    res.stats.light_samples += st.light_samples;
    res.stats.light_failures += st.light_failures;
    res.stats.teleports += st.teleports;
  }
  return res;
}

}  // namespace nilray
