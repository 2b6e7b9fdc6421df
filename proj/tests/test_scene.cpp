#include <gtest/gtest.h>

#include <cmath>

#include "nilray/probes.hpp"
#include "nilray/scene.hpp"
#include "support.hpp"

using namespace nilray;
using nilray::testing::random_point;
using nilray::testing::random_unit;
using nilray::testing::sphere;
using nilray::testing::uniform;

TEST(Sdf, Examples) {
  Scene s;
  s.objects.push_back(sphere({1, 2, -1}, 0.7));
  EXPECT_NEAR(scene_sdf(s, {1, 2, -1}), -0.7, 1e-12);
  for (int i = 0; i < 100; ++i) {
    const NilPoint on = exp({{1, 2, -1}, random_unit()}, 0.7);
    EXPECT_NEAR(scene_sdf(s, on), 0.0, 1e-7);
  }
  Scene two = s;
  two.objects.push_back(sphere({-2, 0, 3}, 0.4));
  Scene other;
  other.objects.push_back(two.objects[1]);
  for (int i = 0; i < 100; ++i) {
    const NilPoint p = random_point(6);
    EXPECT_EQ(scene_sdf(two, p), std::fmin(scene_sdf(s, p), scene_sdf(other, p)));
    const SdfSample n = scene_sdf_nearest(two, p);
    EXPECT_EQ(n.object, scene_sdf(s, p) <= scene_sdf(other, p) ? 0 : 1);
  }
  EXPECT_EQ(scene_sdf_nearest(Scene{}, {}).object, -1);
}

TEST(Sdf, NeverExceedsTrueSurfaceDistance) {
  Scene s;
  s.objects.push_back(sphere({0, 0, 0}, 1.0));
  for (int i = 0; i < 500; ++i) {
    const NilPoint p = random_point(20);
    EXPECT_LE(scene_sdf(s, p), probes::shooting_distance(p) - 1.0 + 1e-7);
  }
}

TEST(Normal, RadialAtSphereSurface) {
  for (int i = 0; i < 100; ++i) {
    const NilPoint c = random_point(4);
    const double r = uniform(0.2, 1.2);
    Scene s;
    s.objects.push_back(sphere(c, r));
    for (int k = 0; k < 3; ++k) {
      Vec3 dir{};
      dir[k] = i % 2 ? 1.0 : -1.0;
      const NilPoint p = exp({c, dir}, r + 1e-5);
      const NilTangent n = surface_normal(s, p);
      EXPECT_NEAR(norm(n.v), 1.0, 1e-12);
      // Velocity of the radial geodesic at p, i.e. the outward direction.
      const Vec3 radial = exp_velocity({c, dir}, r + 1e-5);
      EXPECT_GT(dot(n.v, radial), 1 - 1e-2);
    }
  }
}

TEST(Normal, DegenerateGradientThrows) {
  const auto flat = [](const NilPoint&) { return 1.0; };
  EXPECT_THROW(field_gradient_direction(flat, {}), DegenerateGradient);
}

TEST(Albedo, FlatColorGridAndTexture) {
  SceneObject o = sphere({}, 1.0);
  o.color = {0.2, 0.4, 0.6};
  const Color c = surface_albedo(o, {1, 0, 0});
  EXPECT_LE(c.r, 0.2 + 1e-12);
  EXPECT_GE(c.r, 0.0);

  Image tex(4, 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 4; ++i) tex.set(i, j, {1.0 * (j == 0), 0, 1.0 * (j == 1)});
  o.texture = std::make_shared<const Image>(tex);
  // North pole (+e3 at the center) samples the top row, south pole the bottom.
  EXPECT_GT(surface_albedo(o, exp({{}, {0, 0, 1}}, 1.0)).r, 0.9);
  EXPECT_GT(surface_albedo(o, exp({{}, {0, 0, -1}}, 1.0)).b, 0.9);
  // The orientation frame moves the poles.
  o.orientation = rotation_about({1, 0, 0}, 3.14159265358979323846);
  EXPECT_GT(surface_albedo(o, exp({{}, {0, 0, 1}}, 1.0)).b, 0.9);
}
