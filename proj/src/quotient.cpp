#include "nilray/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nilray {

HeisPoint apply_word(const LatticeWord& w, const HeisPoint& p) {
  HeisPoint q = p;
  for (const LatticeStep& s : w) q = apply_step(s, q);
  return q;
}

LatticeWord inverse_word(const LatticeWord& w) {
  LatticeWord inv(w.rbegin(), w.rend());
  for (LatticeStep& s : inv) s.sign = static_cast<std::int8_t>(-s.sign);
  return inv;
}

HeisPoint word_element(const LatticeWord& w) {
  HeisPoint g{};
  for (const LatticeStep& s : w) g = apply_step(s, g);
  return g;
}

LatticeWord element_word(int i, int j, int k) {
  LatticeWord w;
  const int m = k - i * j;
  auto push = [&w](Generator g, int power) {
    const auto sign = static_cast<std::int8_t>(power < 0 ? -1 : 1);
    for (int n = 0; n < std::abs(power); ++n) w.push_back({g, sign});
  };
  push(Generator::Z, m);
  push(Generator::Y, j);
  push(Generator::X, i);
  return w;
}

std::string to_string(const LatticeWord& w) {
  if (w.empty()) return "e";
  std::string out;
  for (std::size_t n = 0; n < w.size();) {
    std::size_t run = n;
    while (run < w.size() && w[run] == w[n]) ++run;
    if (!out.empty()) out += ' ';
    out += static_cast<char>('x' + static_cast<int>(w[n].generator) - 1);
    const int power = static_cast<int>(run - n) * w[n].sign;
    if (power != 1) out += "^" + std::to_string(power);
    n = run;
  }
  return out;
}

NilIsometry LatticeGroup::generator_isometry(Generator g) {
  const HeisPoint e = apply_step({g, 1}, HeisPoint{});
  return NilIsometry::translation(heis_to_rot(e));
}

bool in_domain(const HeisPoint& p) {
  return p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0 && p.z >= 0.0 && p.z < 1.0;
}

namespace {

void require_finite(const HeisPoint& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
    throw std::invalid_argument("teleport of a non-finite point");
}

void reduce(HeisPoint& p, LatticeWord& word, Generator g, double HeisPoint::*coord) {
  while (p.*coord >= 1.0) {
    const LatticeStep s{g, -1};
    p = apply_step(s, p);
    word.push_back(s);
  }
  while (p.*coord < 0.0) {
    const LatticeStep s{g, 1};
    p = apply_step(s, p);
    word.push_back(s);
  }
}

TeleportResult teleport_ordered(const HeisPoint& p, bool y_first) {
  require_finite(p);
  TeleportResult r{p, {}};
  // The x generator shears z by y; y and z translations leave x alone.
  reduce(r.point, r.word, Generator::X, &HeisPoint::x);
  if (y_first) {
    reduce(r.point, r.word, Generator::Y, &HeisPoint::y);
    reduce(r.point, r.word, Generator::Z, &HeisPoint::z);
  } else {
    reduce(r.point, r.word, Generator::Z, &HeisPoint::z);
    reduce(r.point, r.word, Generator::Y, &HeisPoint::y);
  }
  return r;
}

bool in_cushion(const HeisPoint& p) {
  constexpr double lo = -kTeleportCushion;
  constexpr double hi = 1.0 + kTeleportCushion;
  return p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi && p.z >= lo && p.z <= hi;
}

LatticeWord concat(LatticeWord a, const LatticeWord& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TeleportResult teleport(const HeisPoint& p) { return teleport_ordered(p, true); }

TeleportResult teleport_z_first(const HeisPoint& p) { return teleport_ordered(p, false); }

TeleportedState teleport_state(const NilPoint& p, const NilTangent& v) {
  const TeleportResult r = teleport(rot_to_heis(p));
  const NilPoint q = heis_to_rot(r.point);
  return {q, {q, v.v}, r.word};
}

const std::vector<QuotientCopy>& quotient_neighbourhood() {
  static const std::vector<QuotientCopy> copies = [] {
    std::vector<QuotientCopy> out;
    // The x generator shifts z by y in [0,1), so z needs one extra layer.
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -2; k <= 2; ++k)
          out.push_back({{double(i), double(j), double(k)}, element_word(i, j, k)});
    std::stable_sort(out.begin(), out.end(), [](const QuotientCopy& a, const QuotientCopy& b) {
      return std::fabs(a.element.x) + std::fabs(a.element.y) + std::fabs(a.element.z) <
             std::fabs(b.element.x) + std::fabs(b.element.y) + std::fabs(b.element.z);
    });
    return out;
  }();
  return copies;
}

QuotientSdfSample quotient_sdf(const Scene& s, const NilPoint& p) {
  struct Candidate {
    double bound;
    int object;
    int copy;
    NilPoint center;
  };
  const auto& copies = quotient_neighbourhood();
  std::vector<Candidate> cands;
  cands.reserve(s.objects.size() * copies.size());
  for (std::size_t o = 0; o < s.objects.size(); ++o) {
    for (std::size_t c = 0; c < copies.size(); ++c) {
      const NilPoint center = group_mul(heis_to_rot(copies[c].element), s.objects[o].center);
      const double b = distance_lower_bound(group_mul(group_inv(center), p)) - s.objects[o].radius;
      cands.push_back({b, static_cast<int>(o), static_cast<int>(c), center});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.copy < b.copy;
  });
  QuotientSdfSample best{std::numeric_limits<double>::infinity(), -1, -1};
  for (const Candidate& c : cands) {
    if (c.bound >= best.value) break;
    const double d = conservative_distance(c.center, p) - s.objects[static_cast<std::size_t>(c.object)].radius;
    if (d < best.value) best = {d, c.object, c.copy};
  }
  return best;
}

void validate_quotient_scene(const Scene& s) {
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    if (!in_domain(rot_to_heis(s.objects[i].center)))
      throw std::invalid_argument("object " + std::to_string(i) +
                                  " center lies outside the fundamental domain [0,1)^3");
  }
}

MarchOutcome march_quotient(const Scene& s, const NilTangent& v, const MarchConfig& cfg) {
  validate_quotient_scene(s);
  LatticeWord teleports;
  int n_teleports = 0;
  NilTangent seg = v;
  if (!in_domain(rot_to_heis(v.base))) {
    const TeleportedState ts = teleport_state(v.base, v);
    seg = ts.tangent;
    teleports = ts.word;
    n_teleports = static_cast<int>(ts.word.size());
  }
  double t_done = 0.0;
  double t_seg = 0.0;

  auto miss = [&](int steps) {
    const double t = t_done + t_seg;
    return Miss{t, steps, {exp(seg, t_seg), exp_velocity(seg, t_seg)}, teleports, n_teleports};
  };

  for (int step = 0; step < cfg.max_steps; ++step) {
    const NilPoint p = exp(seg, t_seg);
    const QuotientSdfSample q = quotient_sdf(s, p);
    if (q.value < cfg.eps_hit) {
      const QuotientCopy& copy = quotient_neighbourhood()[static_cast<std::size_t>(q.copy)];
      Hit h;
      h.t = t_done + t_seg;
      h.point = p;
      h.object = q.object;
      h.incoming = {p, exp_velocity(seg, t_seg)};
      h.steps_used = step + 1;
      h.lattice_word = concat(copy.word, inverse_word(teleports));
      h.copy_element = copy.element;
      h.teleports = n_teleports;
      return h;
    }

    double len = std::clamp(q.value, cfg.min_step, kQuotientMaxStep);
    if (t_done + t_seg + len > cfg.t_max) {
      t_seg = cfg.t_max - t_done;
      return miss(step + 1);
    }
    if (!in_cushion(rot_to_heis(exp(seg, t_seg + len)))) {
      double lo = 0.0, hi = len;
      for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (in_cushion(rot_to_heis(exp(seg, t_seg + mid))))
          lo = mid;
        else
          hi = mid;
      }
      len = std::max(lo, cfg.min_step);
    }
    t_seg += len;

    const NilPoint here = exp(seg, t_seg);
    if (!in_domain(rot_to_heis(here))) {
      const TeleportedState ts = teleport_state(here, {here, exp_velocity(seg, t_seg)});
      teleports = concat(teleports, ts.word);
      n_teleports += static_cast<int>(ts.word.size());
      seg = ts.tangent;
      t_done += t_seg;
      t_seg = 0.0;
    }
  }
  return miss(cfg.max_steps);
}

}  // namespace nilray
