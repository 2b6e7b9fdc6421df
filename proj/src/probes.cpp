#include "nilray/probes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "nilray/distance.hpp"
#include "nilray/kernels.hpp"
#include "nilray/quotient.hpp"

namespace nilray::probes {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDedupe = 1e-5;

void parallel_for(int n, const std::function<void(int)>& body) {
  const int threads = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 16);
  if (threads == 1 || n < 8) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += threads) body(i);
    });
}

double height_at(double c, double a2, double t) {
  return c * t + 0.5 * a2 * t * t * series::sinc_defect(c * t);
}

double height_rate(double c, double a2, double t) {
  return c + 0.5 * a2 * t * series::cosc(c * t);
}

// Sign of the horizontal displacement along (a, 0, c) when z reaches h.
double axis_residual(double c, double h) { return std::sin(c * time_to_height(c, h) / 2.0); }

bool same_shot(const AxisShot& p, const AxisShot& q) {
  return std::fabs(p.a - q.a) < kDedupe && std::fabs(p.c - q.c) < kDedupe &&
         std::fabs(p.t - q.t) < kDedupe * std::fmax(1.0, p.t);
}

template <class Pred>
ThresholdEstimate first_true(Pred pred, double h_max, int samples) {
  double prev = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double h = h_max * i / samples;
    if (!pred(h)) {
      prev = h;
      continue;
    }
    ThresholdEstimate est{h, prev, h};
    double lo = prev, hi = h;
    for (int it = 0; it < 60 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) ? hi : lo) = mid;
    }
    est.value = hi;
    return est;
  }
  return {std::numeric_limits<double>::quiet_NaN(), h_max, h_max};
}

}  // namespace

double time_to_height(double c, double h) {
  const double a2 = std::fmax(0.0, 1.0 - c * c);
  double lo = 0.0, hi = h / c;  // z(t) >= c t
  double t = a2 > 0.0 ? std::fmin(hi, std::cbrt(12.0 * h / (a2 * c))) : hi;
  if (!(t > lo && t < hi)) t = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const double f = height_at(c, a2, t) - h;
    if (f > 0) hi = t; else lo = t;
    if (std::fabs(f) <= 4e-16 * h || hi - lo <= 4e-16 * hi) break;
    double next = t - f / height_rate(c, a2, t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

std::vector<AxisShot> shoot_to_axis_point(double h, const ShootGrid& grid) {
  std::vector<AxisShot> out{{0.0, 1.0, h, 0}};
  const int n = std::max(grid.c_samples, 4);
  std::vector<double> f(n + 1);
  for (int i = 1; i <= n; ++i) f[i] = axis_residual(double(i) / n, h);

  for (int i = 1; i < n; ++i) {
    if (f[i] == 0.0 || f[i] * f[i + 1] < 0.0) {
      double lo = double(i) / n, hi = double(i + 1) / n;
      double flo = f[i];
      if (flo != 0.0) {
        for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = axis_residual(mid, h);
          if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
      } else {
        hi = lo;
      }
      double c = 0.5 * (lo + hi);
      // Newton polish on the phase condition c t(c) = 2 pi k.
      const double k = std::round(c * time_to_height(c, h) / (2.0 * kPi));
      for (int it = 0; it < 3 && c < 1.0; ++it) {
        const double g = c * time_to_height(c, h) - 2.0 * kPi * k;
        const double dc = 1e-7 * c;
        const double gp = ((c + dc) * time_to_height(c + dc, h) - (c - dc) * time_to_height(c - dc, h)) / (2 * dc);
        if (gp == 0.0) break;
        const double next = c - g / gp;
        if (!(next > 0.0 && next <= 1.0)) break;
        const double gn = next * time_to_height(next, h) - 2.0 * kPi * k;
        if (std::fabs(gn) >= std::fabs(g)) break;
        c = next;
      }
      AxisShot shot{std::sqrt(std::fmax(0.0, 1.0 - c * c)), c, time_to_height(c, h), static_cast<int>(k)};
      const bool dup = std::any_of(out.begin(), out.end(), [&](const AxisShot& s) { return same_shot(s, shot); });
      if (!dup) out.push_back(shot);
    }
  }
  std::stable_sort(out.begin() + 1, out.end(),
                   [](const AxisShot& p, const AxisShot& q) { return p.turns < q.turns; });
  return out;
}

std::vector<ConjugateRow> conjugate_sweep(double h_min, double h_max, int samples,
                                          const ShootGrid& grid) {
  std::vector<ConjugateRow> rows(std::max(samples, 1));
  parallel_for(static_cast<int>(rows.size()), [&](int i) {
    const double h = rows.size() == 1 ? h_min : h_min + (h_max - h_min) * i / (rows.size() - 1);
    rows[i] = {h, shoot_to_axis_point(h, grid)};
  });
  return rows;
}

ThresholdEstimate first_conjugate_distance(const ShootGrid& grid, double h_max, int sweep_samples) {
  return first_true([&](double h) { return shoot_to_axis_point(h, grid).size() > 1; }, h_max,
                    sweep_samples);
}

namespace {

AxisShot best_shot(const std::vector<AxisShot>& shots) {
  return *std::min_element(shots.begin(), shots.end(),
                           [](const AxisShot& p, const AxisShot& q) { return p.t < q.t; });
}

}  // namespace

std::vector<ShortcutRow> shortcut_sweep(double h_min, double h_max, int samples,
                                        const ShootGrid& grid) {
  std::vector<ShortcutRow> rows(std::max(samples, 1));
  parallel_for(static_cast<int>(rows.size()), [&](int i) {
    const double h = rows.size() == 1 ? h_min : h_min + (h_max - h_min) * i / (rows.size() - 1);
    rows[i] = {h, h, best_shot(shoot_to_axis_point(h, grid))};
  });
  return rows;
}

ThresholdEstimate vertical_shortcut_threshold(const ShootGrid& grid, double h_max, int sweep_samples) {
  return first_true(
      [&](double h) { return best_shot(shoot_to_axis_point(h, grid)).t < h * (1.0 - 1e-9); }, h_max,
      sweep_samples);
}

double axis_distance(double h, const ShootGrid& grid) {
  return best_shot(shoot_to_axis_point(h, grid)).t;
}

// ---------------------------------------------------------------------------

bool launch_hits_sphere(double h, double r, double alpha, double eps_hit) {
  Scene scene;
  SceneObject obj;
  obj.radius = r;
  scene.objects.push_back(obj);
  MarchConfig cfg;
  cfg.eps_hit = eps_hit;
  cfg.t_max = 2.0 * h + 20.0;
  cfg.max_steps = 20000;
  cfg.min_step = 1e-9;
  const NilTangent v{{0.0, 0.0, -h}, {std::sin(alpha), 0.0, std::cos(alpha)}};
  return std::holds_alternative<Hit>(march(scene, v, cfg));
}

double angular_radius(double h, double r, const AngularOptions& opts) {
  if (!(h > r && r > 0.0)) throw NoBracket("angular_radius needs h > r > 0");
  if (!launch_hits_sphere(h, r, 0.0, opts.eps_hit)) throw NoBracket("axial ray misses the sphere");
  double lo = 0.0, hi = -1.0;
  for (double a = opts.scan_step; a < kPi; a += opts.scan_step) {
    if (!launch_hits_sphere(h, r, a, opts.eps_hit)) {
      hi = a;
      break;
    }
    lo = a;
  }
  if (hi < 0.0) throw NoBracket("no missing launch angle found");
  for (int it = 0; it < opts.bisection_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    (launch_hits_sphere(h, r, mid, opts.eps_hit) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double euclidean_angular_radius(double h, double r) { return std::asin(r / h); }

// ---------------------------------------------------------------------------

namespace {

// z reached on the branch with phase u when the horizontal displacement is rho.
double phase_residual(double u, double rho, double z) {
  const double sigma = series::sinc(u / 2.0);
  return u + rho * rho * series::sinc_defect(u) / (2.0 * sigma * sigma) - z;
}

double bisect_phase(double lo, double hi, double rho, double z) {
  double flo = phase_residual(lo, rho, z);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::fmax(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = phase_residual(mid, rho, z);
    if ((fm <= 0) == (flo <= 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Solutions for z >= 0.
std::vector<ShootingSolution> solutions_upper(double x, double y, double z, int max_turns) {
  std::vector<ShootingSolution> out;
  const double rho = std::hypot(x, y);
  if (rho == 0.0) {
    out.push_back({z, z, {0.0, 0.0, z}});
    for (int k = 1; k <= max_turns && 2.0 * kPi * k < z; ++k) {
      const double u = 2.0 * kPi * k;
      const double m = std::sqrt(4.0 * kPi * k * (z - u));
      out.push_back({u, std::hypot(m, u), {m, 0.0, u}});
    }
    return out;
  }
  const double phi = std::atan2(y, x);
  auto make = [&](double u) {
    const double sigma = series::sinc(u / 2.0);
    const double m = rho / std::fabs(sigma);
    const double psi = phi - u / 2.0 + (sigma < 0 ? kPi : 0.0);
    return ShootingSolution{u, std::hypot(m, u), {m * std::cos(psi), m * std::sin(psi), u}};
  };

  if (z == 0.0) {
    out.push_back(make(0.0));
  } else {
    double hi = kPi;
    for (int k = 2; k < 60 && phase_residual(hi, rho, z) <= 0.0; ++k) hi = 2.0 * kPi * (1.0 - std::ldexp(1.0, -k));
    out.push_back(make(bisect_phase(0.0, hi, rho, z)));
  }

  constexpr int kBranchSamples = 256;
  for (int k = 1; k <= max_turns; ++k) {
    const double u0 = 2.0 * kPi * k;
    double prev_u = u0 + 2.0 * kPi / kBranchSamples * 1e-3;
    double prev_f = phase_residual(prev_u, rho, z);
    for (int i = 1; i < kBranchSamples; ++i) {
      const double u = u0 + 2.0 * kPi * i / kBranchSamples;
      const double fu = phase_residual(u, rho, z);
      if ((fu <= 0) != (prev_f <= 0)) out.push_back(make(bisect_phase(prev_u, u, rho, z)));
      prev_u = u;
      prev_f = fu;
    }
    const double end_u = u0 + 2.0 * kPi * (1.0 - 1e-3 / kBranchSamples);
    const double fe = phase_residual(end_u, rho, z);
    if ((fe <= 0) != (prev_f <= 0)) out.push_back(make(bisect_phase(prev_u, end_u, rho, z)));
  }
  return out;
}

}  // namespace

std::vector<ShootingSolution> shooting_solutions(const NilPoint& p, int max_turns) {
  if (p.z >= 0.0) return solutions_upper(p.x, p.y, p.z, max_turns);
  // (x, y, z) -> (x, -y, -z) is an isometry acting as diag(1, -1, -1) on the frame.
  std::vector<ShootingSolution> out = solutions_upper(p.x, -p.y, -p.z, max_turns);
  for (ShootingSolution& s : out) {
    s.u = -s.u;
    s.w = {s.w.x, -s.w.y, -s.w.z};
  }
  return out;
}

double shooting_distance(const NilPoint& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const ShootingSolution& s : shooting_solutions(p)) best = std::fmin(best, s.t);
  return best;
}

// ---------------------------------------------------------------------------

std::vector<TraceRow> geodesic_trace(double a, double c, double t_max, int samples, int ode_substeps) {
  samples = std::max(samples, 2);
  std::vector<double> w1(samples), w2(samples, 0.0), w3(samples), x(samples), y(samples), z(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = t_max * i / (samples - 1);
    w1[i] = a * t;
    w3[i] = c * t;
  }
  exp_vector_batch({w1, w2, w3}, {x, y, z});

  std::vector<TraceRow> rows(samples);
  OdeState s{NilPoint{}, {a, 0.0, c}};
  for (int i = 0; i < samples; ++i) {
    const double t = t_max * i / (samples - 1);
    if (i > 0) s = integrate_geodesic({s.p, s.v}, t_max / (samples - 1), ode_substeps);
    rows[i] = {t, {x[i], y[i], z[i]}, s.p};
  }
  return rows;
}

// ---------------------------------------------------------------------------

double fit_vertical_scale(int samples, const ShootGrid& grid) {
  std::vector<double> num(samples), den(samples);
  parallel_for(samples, [&](int i) {
    const double h = samples == 1 ? 1.0 : 1.0 + 99.0 * i / (samples - 1);
    num[i] = axis_distance(h, grid) * std::sqrt(h);
    den[i] = h;
  });
  double sn = 0.0, sd = 0.0;
  for (int i = 0; i < samples; ++i) {
    sn += num[i];
    sd += den[i];
  }
  return sn / sd;
}

std::vector<NilPoint> validation_grid(int count, double lo, double hi) {
  std::vector<NilPoint> pts;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < count; ++i) {
    const double d = count == 1 ? lo : lo * std::pow(hi / lo, double(i) / (count - 1));
    const double s = 2.0 * std::fmod((i + 0.5) * golden, 1.0) - 1.0;
    // Minimizing up to the first return to the axis (|c| t = 2 pi).
    const double c = s * std::fmin(1.0, 2.0 * kPi / d) * 0.999;
    const double a = std::sqrt(1.0 - c * c);
    const double psi = 2.0 * kPi * std::fmod(i * std::numbers::sqrt2, 1.0);
    pts.push_back(exp_vector({d * a * std::cos(psi), d * a * std::sin(psi), d * c}));
  }
  return pts;
}

double bilipschitz_constant(const std::vector<NilPoint>& pts) {
  std::vector<double> ratio(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    const double d = shooting_distance(pts[i]);
    const double f = far_field_estimate(pts[i]);
    ratio[i] = std::fmax(f / d, d / f);
  });
  double L = 1.0;
  for (double r : ratio) L = std::fmax(L, r);
  return L;
}

std::vector<NilPoint> near_field_grid(int count, double threshold) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<NilPoint> pts;
  const double zmax = std::pow(threshold / kVerticalScale, 2);
  while (static_cast<int>(pts.size()) < count) {
    const NilPoint rel{threshold * unit(rng), threshold * unit(rng), zmax * unit(rng)};
    if (far_field_estimate(rel) < threshold && (rel.x != 0 || rel.y != 0 || rel.z != 0)) pts.push_back(rel);
  }
  return pts;
}

double newton_convergence_rate(const std::vector<NilPoint>& pts) {
  if (pts.empty()) return 1.0;
  std::vector<char> ok(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    // A deterministic base point keeps the left translation in play.
    const NilPoint p{std::sin(i * 1.7) * 3.0, std::cos(i * 0.9) * 3.0, std::sin(i * 0.37) * 5.0};
    const NilPoint q = group_mul(p, pts[i]);
    const ShootResult s = inverse_exp(p, q);
    const double d = shooting_distance(pts[i]);
    ok[i] = s.ok() && std::fabs(s.t - d) < 1e-7 * std::fmax(1.0, d);
  });
  return static_cast<double>(std::count(ok.begin(), ok.end(), 1)) / pts.size();
}

Calibration calibrate(int grid_points) {
  Calibration cal;
  cal.vertical_scale = fit_vertical_scale();
  cal.near_threshold = kNearFieldThreshold;
  cal.near_points = 1000;
  cal.newton_rate = newton_convergence_rate(near_field_grid(cal.near_points, cal.near_threshold));
  while (cal.newton_rate < 0.99 && cal.near_threshold > 0.1) {
    cal.near_threshold *= 0.8;
    cal.newton_rate = newton_convergence_rate(near_field_grid(cal.near_points, cal.near_threshold));
  }
  cal.grid_points = grid_points;
  cal.bilipschitz = bilipschitz_constant(validation_grid(grid_points, cal.near_threshold, 50.0));
  return cal;
}

// ---------------------------------------------------------------------------

namespace {

void header(std::ostream& out, std::initializer_list<std::pair<const char*, std::string>> kv) {
  for (const auto& [k, v] : kv) out << "# " << k << '=' << v << '\n';
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

void write_conjugate_csv(std::ostream& out, const std::vector<ConjugateRow>& rows,
                         const ShootGrid& grid, const ThresholdEstimate& h_star) {
  header(out, {{"probe", "conjugate"},
               {"c_samples", std::to_string(grid.c_samples)},
               {"h_star", num(h_star.value)},
               {"h_star_bracket", num(h_star.bracket_lo) + ":" + num(h_star.bracket_hi)}});
  out << "h,count,solutions\n";
  for (const ConjugateRow& r : rows) {
    out << num(r.h) << ',' << r.solutions.size() << ',';
    for (std::size_t i = 0; i < r.solutions.size(); ++i) {
      const AxisShot& s = r.solutions[i];
      if (i) out << ';';
      out << num(s.a) << ' ' << num(s.c) << ' ' << num(s.t);
    }
    out << '\n';
  }
}

void write_shortcut_csv(std::ostream& out, const std::vector<ShortcutRow>& rows,
                        const ShootGrid& grid, const ThresholdEstimate& h0) {
  header(out, {{"probe", "shortcut"},
               {"c_samples", std::to_string(grid.c_samples)},
               {"h0", num(h0.value)},
               {"h0_bracket", num(h0.bracket_lo) + ":" + num(h0.bracket_hi)}});
  out << "h,axial_t,best_t,best_a,best_c,best_turns\n";
  for (const ShortcutRow& r : rows)
    out << num(r.h) << ',' << num(r.axial_t) << ',' << num(r.best.t) << ',' << num(r.best.a) << ','
        << num(r.best.c) << ',' << r.best.turns << '\n';
}

void write_angular_csv(std::ostream& out, const std::vector<AngularRow>& rows,
                       const AngularOptions& opts) {
  header(out, {{"probe", "angular"},
               {"scan_step", num(opts.scan_step)},
               {"bisection_iterations", std::to_string(opts.bisection_iterations)},
               {"eps_hit", num(opts.eps_hit)}});
  out << "h,r,angle,euclidean\n";
  for (const AngularRow& r : rows)
    out << num(r.h) << ',' << num(r.r) << ',' << num(r.angle) << ',' << num(r.euclidean) << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, double a, double c) {
  header(out, {{"probe", "geodesic-trace"}, {"a", num(a)}, {"c", num(c)}, {"samples", std::to_string(rows.size())}});
  out << "t,x,y,z,x_ode,y_ode,z_ode\n";
  for (const TraceRow& r : rows)
    out << num(r.t) << ',' << num(r.closed.x) << ',' << num(r.closed.y) << ',' << num(r.closed.z) << ','
        << num(r.ode.x) << ',' << num(r.ode.y) << ',' << num(r.ode.z) << '\n';
}

std::vector<QuotientTraceRow> quotient_trace(const NilTangent& start, double t_max, int samples) {
  samples = std::max(samples, 2);
  const double dt = t_max / (samples - 1);
  const int sub = std::max(1, static_cast<int>(std::ceil(dt / kQuotientMaxStep)));
  std::vector<QuotientTraceRow> rows;
  TeleportedState st = teleport_state(start.base, start);
  LatticeWord word = st.word;
  NilTangent v = st.tangent;
  for (int i = 0; i < samples; ++i) {
    if (i > 0) {
      for (int k = 0; k < sub; ++k) {
        const GeodesicParams geo = GeodesicParams::from_tangent(v);
        const NilTangent next = geo.tangent(dt / sub);
        st = teleport_state(next.base, next);
        word.insert(word.end(), st.word.begin(), st.word.end());
        v = st.tangent;
      }
    }
    rows.push_back({dt * i, v.base, rot_to_heis(v.base), to_string(word)});
  }
  return rows;
}

void write_quotient_trace_csv(std::ostream& out, const std::vector<QuotientTraceRow>& rows) {
  header(out, {{"probe", "geodesic-trace"}, {"quotient", "true"}, {"samples", std::to_string(rows.size())}});
  out << "t,x,y,z,hx,hy,hz,word\n";
  for (const QuotientTraceRow& r : rows)
    out << num(r.t) << ',' << num(r.point.x) << ',' << num(r.point.y) << ',' << num(r.point.z) << ','
        << num(r.heis.x) << ',' << num(r.heis.y) << ',' << num(r.heis.z) << ',' << r.word << '\n';
}

}  // namespace nilray::probes
