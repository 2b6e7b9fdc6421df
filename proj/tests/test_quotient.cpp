#include <gtest/gtest.h>

#include <cmath>

#include "nilray/quotient.hpp"
#include "support.hpp"

using namespace nilray;
using nilray::testing::random_unit;
using nilray::testing::sphere;
using nilray::testing::uniform;

namespace {

HeisPoint random_heis(double scale) { return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)}; }

double heis_err(const HeisPoint& a, const HeisPoint& b) { return max_abs(a.coords() - b.coords()); }

constexpr LatticeStep kX{Generator::X, 1}, kXi{Generator::X, -1};
constexpr LatticeStep kY{Generator::Y, 1}, kYi{Generator::Y, -1};
constexpr LatticeStep kZ{Generator::Z, 1}, kZi{Generator::Z, -1};

}  // namespace

TEST(Domain, HalfOpenCube) {
  EXPECT_TRUE(in_domain({0.5, 0.5, 0.5}));
  EXPECT_TRUE(in_domain({0, 0, 0}));
  EXPECT_FALSE(in_domain({1.0, 0.5, 0.5}));
  EXPECT_FALSE(in_domain({-0.1, 0.5, 0.5}));
  EXPECT_FALSE(in_domain({0.5, 0.5, 1.0}));
}

TEST(Teleport, Examples) {
  const TeleportResult same = teleport({0.5, 0.3, 0.9});
  EXPECT_EQ(same.point, (HeisPoint{0.5, 0.3, 0.9}));
  EXPECT_TRUE(same.word.empty());

  const TeleportResult r = teleport({1.5, 0.3, -0.1});
  EXPECT_LT(heis_err(r.point, {0.5, 0.3, 0.6}), 1e-15);
  ASSERT_EQ(r.word.size(), 2u);
  EXPECT_EQ(r.word[0], kXi);
  EXPECT_EQ(r.word[1], kZ);
  EXPECT_EQ(r.word[0].index(), -1);
  EXPECT_EQ(r.word[1].index(), 3);
  EXPECT_EQ(to_string(r.word), "x^-1 z");
  EXPECT_EQ(to_string({}), "e");
  EXPECT_EQ(to_string({kY, kY, kZi}), "y^2 z^-1");
}

TEST(Teleport, RandomPointsRoundTrip) {
  for (int i = 0; i < 1000; ++i) {
    const HeisPoint p = random_heis(10);
    const TeleportResult r = teleport(p);
    EXPECT_TRUE(in_domain(r.point));
    EXPECT_LT(heis_err(apply_word(r.word, p), r.point), 1e-12);
    EXPECT_LT(heis_err(apply_word(inverse_word(r.word), r.point), p), 1e-10);
    EXPECT_TRUE(teleport(r.point).word.empty());

    const TeleportResult z = teleport_z_first(p);
    EXPECT_EQ(z.point, r.point);
    EXPECT_EQ(word_element(z.word), word_element(r.word));
  }
}

TEST(Teleport, NonFiniteRejected) {
  EXPECT_THROW(teleport({std::nan(""), 0, 0}), std::invalid_argument);
}

TEST(Lattice, GeneratorRelations) {
  for (int i = 0; i < 200; ++i) {
    const HeisPoint p = random_heis(5);
    EXPECT_EQ(apply_word({kY, kZ}, p), apply_word({kZ, kY}, p));
    // x y x^-1 = y z: conjugation by x acts on (y, z) by the monodromy.
    EXPECT_LT(heis_err(apply_word({kXi, kY, kX}, p), apply_word({kY, kZ}, p)), 1e-12);
    EXPECT_LT(heis_err(apply_word({kXi, kZ, kX}, p), apply_word({kZ}, p)), 1e-12);
    // Generators are left translations by the unit points.
    for (Generator g : {Generator::X, Generator::Y, Generator::Z}) {
      const HeisPoint e = apply_step({g, 1}, HeisPoint{});
      EXPECT_LT(heis_err(apply_step({g, 1}, p), heis_mul(e, p)), 1e-12);
      const NilIsometry iso = LatticeGroup::generator_isometry(g);
      EXPECT_LT(max_abs(apply_isometry(iso, heis_to_rot(p)).coords() - heis_to_rot(apply_step({g, 1}, p)).coords()),
                1e-12);
    }
  }
  const LatticeGroup group;
  EXPECT_EQ(group.monodromy[0][1], 1);
}

TEST(Lattice, ElementWords) {
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int k = -3; k <= 3; ++k) {
        const HeisPoint g = word_element(element_word(i, j, k));
        EXPECT_EQ(g, (HeisPoint{double(i), double(j), double(k)}));
      }
}

TEST(TeleportState, PreservesTangentAndMatchesDifferential) {
  for (int i = 0; i < 200; ++i) {
    const NilPoint p = heis_to_rot(random_heis(3));
    const NilTangent v{p, random_unit()};
    const TeleportedState ts = teleport_state(p, v);
    EXPECT_TRUE(in_domain(rot_to_heis(ts.point)));
    EXPECT_NEAR(ts.tangent.norm(), 1.0, 1e-12);
    EXPECT_EQ(ts.tangent.base, ts.point);
    // Finite-difference differential of the applied lattice map.
    const double h = 1e-6;
    const Vec3 d = coordinate_velocity(v);
    const HeisPoint moved = apply_word(ts.word, rot_to_heis(NilPoint::from(p.coords() + d * h)));
    const Vec3 fd = (heis_to_rot(moved).coords() - ts.point.coords()) / h;
    EXPECT_LT(norm(fd - coordinate_velocity(ts.tangent)), 1e-5);
    // Continuing the geodesic from either side gives the same orbit point.
    for (double t : {0.3, 1.7}) {
      const HeisPoint a = teleport(rot_to_heis(exp(v, t))).point;
      const HeisPoint b = teleport(rot_to_heis(exp(ts.tangent, t))).point;
      EXPECT_LT(heis_err(a, b), 1e-9);
    }
  }
  const NilPoint inside = heis_to_rot({0.2, 0.4, 0.6});
  const TeleportedState same = teleport_state(inside, {inside, {0, 1, 0}});
  EXPECT_EQ(same.point, inside);
  EXPECT_TRUE(same.word.empty());
}

TEST(QuotientSdf, InvariantUnderTeleport) {
  Scene s;
  s.quotient = true;
  s.objects.push_back(sphere(heis_to_rot({0.5, 0.5, 0.5}), 0.1));
  s.objects.push_back(sphere(heis_to_rot({0.1, 0.8, 0.2}), 0.05));
  for (int i = 0; i < 300; ++i) {
    const HeisPoint h{uniform(-0.1, 1.1), uniform(-0.1, 1.1), uniform(-0.1, 1.1)};
    const NilPoint p = heis_to_rot(h);
    const NilPoint q = heis_to_rot(teleport(h).point);
    EXPECT_NEAR(quotient_sdf(s, p).value, quotient_sdf(s, q).value, 1e-8);
  }
}

TEST(QuotientSdf, ValidationNamesObject) {
  Scene s;
  s.objects.push_back(sphere(heis_to_rot({0.5, 0.5, 0.5}), 0.1));
  s.objects.push_back(sphere(heis_to_rot({1.5, 0.5, 0.5}), 0.1));
  try {
    validate_quotient_scene(s);
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("object 1"), std::string::npos);
  }
}

TEST(MarchQuotient, EmptySpaceRayTeleportsAlongX) {
  Scene s;
  s.quotient = true;
  MarchConfig cfg;
  cfg.t_max = 5;
  const NilPoint start = heis_to_rot({0.5, 0.0, 0.5});
  const MarchOutcome m = march_quotient(s, {start, {1, 0, 0}}, cfg);
  ASSERT_TRUE(std::holds_alternative<Miss>(m));
  const Miss& miss = std::get<Miss>(m);
  EXPECT_NEAR(miss.t, 5.0, 1e-12);
  int x_steps = 0;
  for (const LatticeStep& st : miss.lattice_word) x_steps += st.generator == Generator::X;
  EXPECT_GE(x_steps, 4);
  EXPECT_EQ(miss.teleports, static_cast<int>(miss.lattice_word.size()));
}

TEST(MarchQuotient, HitThroughTheXFace) {
  Scene s;
  s.quotient = true;
  s.objects.push_back(sphere(heis_to_rot({0.5, 0.5, 0.5}), 0.1));
  // Looking along -e1 from x = 0.2: the ray keeps y and z fixed in the
  // Heisenberg chart, leaves through x = 0 and comes back with z shifted by y.
  const NilPoint cam = heis_to_rot({0.2, 0.5, 0.0});
  const MarchOutcome m = march_quotient(s, {cam, {-1, 0, 0}}, MarchConfig{});
  ASSERT_TRUE(std::holds_alternative<Hit>(m));
  const Hit& h = std::get<Hit>(m);
  EXPECT_FALSE(h.lattice_word.empty());
  EXPECT_GE(h.teleports, 1);
  EXPECT_NEAR(h.t, 0.6, 1e-3);
  // The recorded word carries the object onto the image hit in the universal
  // cover: here x^-1, the copy one step back along x.
  const HeisPoint seen = rot_to_heis(exp({cam, {-1, 0, 0}}, h.t));
  const NilPoint image = heis_to_rot(apply_word(h.lattice_word, rot_to_heis(s.objects[0].center)));
  EXPECT_NEAR(distance(image, heis_to_rot(seen)), 0.1, 1e-3);
  EXPECT_EQ(word_element(h.lattice_word), (HeisPoint{-1, 0, 0}));
}

TEST(MarchQuotient, YZOrderIndependence) {
  // The order of the commuting phases does not change the orbit point reached.
  for (int i = 0; i < 200; ++i) {
    const HeisPoint p = random_heis(4);
    EXPECT_EQ(teleport(p).point, teleport_z_first(p).point);
  }
}
