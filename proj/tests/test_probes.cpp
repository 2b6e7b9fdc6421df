#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nilray/probes.hpp"
#include "nilray/quotient.hpp"
#include "support.hpp"

using namespace nilray;
using namespace nilray::probes;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form axis solutions: turn k needs h > 2 pi k, with
// c_k^2 = pi k / (h - pi k) and t_k = 2 sqrt(pi k (h - pi k)).
int expected_count(double h) {
  int n = 1;
  for (int k = 1; 2 * kPi * k < h; ++k) ++n;
  return n;
}

}  // namespace

TEST(Shoot, SolutionsReachTheAxisPoint) {
  for (double h : {1.0, 5.0, 7.0, 13.0, 20.0}) {
    const auto sols = shoot_to_axis_point(h);
    ASSERT_FALSE(sols.empty());
    EXPECT_EQ(sols[0].turns, 0);
    EXPECT_NEAR(sols[0].c, 1.0, 1e-12);
    EXPECT_NEAR(sols[0].t, h, 1e-9);
    for (const AxisShot& s : sols) {
      EXPECT_GE(s.a, 0.0);
      EXPECT_NEAR(s.a * s.a + s.c * s.c, 1.0, 1e-12);
      const NilPoint p = exp_origin(s.a, s.c, s.t);
      EXPECT_LT(max_abs(p.coords() - Vec3{0, 0, h}), 1e-8) << "h=" << h << " turns=" << s.turns;
      if (s.turns > 0) {
        const double k = s.turns;
        EXPECT_NEAR(s.c * s.c, kPi * k / (h - kPi * k), 1e-8);
        EXPECT_NEAR(s.t, 2 * std::sqrt(kPi * k * (h - kPi * k)), 1e-8);
      }
    }
    EXPECT_EQ(static_cast<int>(sols.size()), expected_count(h)) << "h=" << h;
  }
}

TEST(Shoot, TimeToHeight) {
  for (double c : {0.05, 0.3, 0.9, 1.0}) {
    for (double h : {0.5, 3.0, 17.0}) {
      const double t = time_to_height(c, h);
      EXPECT_NEAR(exp_origin(std::sqrt(1 - c * c), c, t).z, h, 1e-9);
    }
  }
}

TEST(Conjugate, CountsNonDecreasingAndThreshold) {
  const auto rows = conjugate_sweep(0.5, 20, 60);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].solutions.size(), rows[i - 1].solutions.size());
  const ThresholdEstimate h = first_conjugate_distance();
  EXPECT_NEAR(h.value, 2 * kPi, 1e-3);
  EXPECT_LE(h.bracket_lo, h.value);
  EXPECT_GE(h.bracket_hi, h.value);
  EXPECT_EQ(shoot_to_axis_point(h.value * 0.99).size(), 1u);
  EXPECT_GE(shoot_to_axis_point(h.value * 1.01).size(), 2u);
  ShootGrid fine;
  fine.c_samples *= 2;
  EXPECT_NEAR(first_conjugate_distance(fine, 20, 800).value / h.value, 1.0, 0.01);
}

TEST(Shortcut, ThresholdAndRows) {
  const ThresholdEstimate h0 = vertical_shortcut_threshold();
  for (double h : {1.0, 3.0, 0.9 * h0.value}) EXPECT_NEAR(axis_distance(h), h, 1e-9);
  EXPECT_LT(axis_distance(2 * h0.value), 2 * h0.value);
  for (double h = h0.value * 1.001; h < 40; h += 1.3) EXPECT_LT(axis_distance(h), h);
  ShootGrid fine;
  fine.c_samples *= 2;
  EXPECT_NEAR(vertical_shortcut_threshold(fine, 20, 800).value / h0.value, 1.0, 0.01);
  const auto rows = shortcut_sweep(1, 30, 30);
  for (const auto& r : rows) {
    EXPECT_EQ(r.axial_t, r.h);
    EXPECT_LE(r.best.t, r.h);
  }
  // The shortcut is the first helix, which exists exactly past 2 pi.
  EXPECT_NEAR(h0.value, 2 * kPi, 1e-3);
}

TEST(ShootingOracle, AgreesWithAxisShots) {
  for (double h : {3.0, 9.0, 25.0}) {
    EXPECT_NEAR(shooting_distance({0, 0, h}), axis_distance(h), 1e-8);
    EXPECT_NEAR(shooting_distance({0, 0, -h}), axis_distance(h), 1e-8);
  }
}

TEST(Angular, BasicShape) {
  EXPECT_THROW(angular_radius(0.5, 1.0), NoBracket);
  const double near = angular_radius(1.2, 1.0);
  const double mid = angular_radius(2.0, 1.0);
  EXPECT_GT(near, mid);
  EXPECT_GT(near, 0.9);
  EXPECT_NEAR(euclidean_angular_radius(20, 1), std::asin(0.05), 1e-15);
  EXPECT_TRUE(launch_hits_sphere(5, 1, 0));
  EXPECT_FALSE(launch_hits_sphere(5, 1, kPi / 2));
}

TEST(Trace, ClosedFormMatchesOde) {
  const auto rows = geodesic_trace(0.6, 0.8, 10, 200);
  ASSERT_EQ(rows.size(), 200u);
  EXPECT_EQ(rows.back().t, 10.0);
  double worst = 0;
  for (const auto& r : rows) worst = std::fmax(worst, max_abs(r.closed.coords() - r.ode.coords()));
  EXPECT_LT(worst, 1e-6);
}

TEST(Calibration, GridsAndRates) {
  const auto grid = validation_grid(200, kNearFieldThreshold, 50);
  for (const NilPoint& p : grid) {
    const double d = shooting_distance(p);
    EXPECT_GE(d, kNearFieldThreshold * (1 - 1e-6));
    EXPECT_LE(d, 50 * (1 + 1e-6));
  }
  EXPECT_EQ(validation_grid(200, kNearFieldThreshold, 50).front(), grid.front());
  const auto near = near_field_grid(200, kNearFieldThreshold);
  EXPECT_EQ(near.size(), 200u);
  for (const NilPoint& p : near) EXPECT_LT(far_field_estimate(p), kNearFieldThreshold);
  EXPECT_GE(newton_convergence_rate(near), 0.99);
}

TEST(Csv, HeadersAndDeterminism) {
  const auto rows = conjugate_sweep(1, 10, 5);
  const ThresholdEstimate h{6.28, 6.0, 6.5};
  std::ostringstream a, b;
  write_conjugate_csv(a, rows, {}, h);
  write_conjugate_csv(b, conjugate_sweep(1, 10, 5), {}, h);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("# ", 0), 0u);
  EXPECT_NE(a.str().find("c_samples=2000"), std::string::npos);
  EXPECT_NE(a.str().find("\nh,count,solutions\n"), std::string::npos);

  std::ostringstream s;
  write_shortcut_csv(s, shortcut_sweep(1, 10, 3), {}, h);
  EXPECT_NE(s.str().find("\nh,axial_t,best_t,best_a,best_c,best_turns\n"), std::string::npos);

  std::ostringstream g;
  write_angular_csv(g, {{5, 1, 0.5, 0.2}}, {});
  EXPECT_NE(g.str().find("\nh,r,angle,euclidean\n"), std::string::npos);

  std::ostringstream t;
  write_trace_csv(t, geodesic_trace(0.6, 0.8, 1, 4), 0.6, 0.8);
  EXPECT_NE(t.str().find("\nt,x,y,z,x_ode,y_ode,z_ode\n"), std::string::npos);
}

TEST(QuotientTrace, StaysInDomainAndRecordsWords) {
  const NilPoint start = heis_to_rot({0.5, 0.2, 0.5});
  const auto rows = quotient_trace({start, normalized(Vec3{1, 0.3, 0.2})}, 6, 60);
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) {
    EXPECT_TRUE(in_domain(r.heis));
    EXPECT_LT(max_abs(rot_to_heis(r.point).coords() - r.heis.coords()), 1e-12);
  }
  EXPECT_NE(rows.back().word, "e");
  std::ostringstream out;
  write_quotient_trace_csv(out, rows);
  EXPECT_NE(out.str().find("t,x,y,z,hx,hy,hz,word"), std::string::npos);
}
