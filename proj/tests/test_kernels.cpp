#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nilray/distance.hpp"
#include "nilray/geodesic.hpp"
#include "nilray/kernels.hpp"
#include "support.hpp"

using namespace nilray;
using nilray::testing::uniform;

namespace {

// Odd length so the scalar tail of the vector kernels runs too.
constexpr std::size_t kN = 4099;

struct Inputs {
  std::vector<double> a, b, c;
};

Inputs random_inputs(double scale) {
  Inputs in;
  for (std::size_t i = 0; i < kN; ++i) {
    // Mix in values inside the series window and exact zeros.
    const double s = i % 7 == 0 ? 1e-3 : (i % 11 == 0 ? 0.0 : scale);
    in.a.push_back(uniform(-s, s));
    in.b.push_back(uniform(-s, s));
    in.c.push_back(uniform(-s, s));
  }
  return in;
}

double rel_err(double x, double ref) { return std::fabs(x - ref) / std::fmax(1.0, std::fabs(ref)); }

class Avx2 : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd_supported(SimdLevel::Avx2)) GTEST_SKIP() << "AVX2 unavailable on this machine";
  }
};

}  // namespace

TEST(KernelsScalar, ExpMatchesInlineReference) {
  const Inputs in = random_inputs(20);
  std::vector<double> x(kN), y(kN), z(kN);
  kernels::exp_vector_scalar(in.a.data(), in.b.data(), in.c.data(), x.data(), y.data(), z.data(), kN);
  for (std::size_t i = 0; i < kN; ++i) {
    const NilPoint p = exp_vector({in.a[i], in.b[i], in.c[i]});
    EXPECT_EQ(x[i], p.x);
    EXPECT_EQ(y[i], p.y);
    EXPECT_EQ(z[i], p.z);
  }
}

TEST(KernelsScalar, FarFieldAndLowerBoundMatchInline) {
  const Inputs in = random_inputs(50);
  std::vector<double> f(kN), lb(kN);
  kernels::far_field_scalar(in.a.data(), in.b.data(), in.c.data(), f.data(), kN);
  kernels::lower_bound_scalar(in.a.data(), in.b.data(), in.c.data(), lb.data(), kN);
  for (std::size_t i = 0; i < kN; ++i) {
    const NilPoint p{in.a[i], in.b[i], in.c[i]};
    EXPECT_EQ(f[i], far_field_estimate(p));
    EXPECT_EQ(lb[i], distance_lower_bound(p));
  }
}

TEST_F(Avx2, SinCosMatchesLibm) {
  std::vector<double> u(kN), s(kN), c(kN);
  for (std::size_t i = 0; i < kN; ++i) u[i] = uniform(-200, 200);
  kernels::sincos_avx2(u.data(), s.data(), c.data(), kN);
  for (std::size_t i = 0; i < kN; ++i) {
    EXPECT_NEAR(s[i], std::sin(u[i]), 1e-14);
    EXPECT_NEAR(c[i], std::cos(u[i]), 1e-14);
  }
}

TEST_F(Avx2, ExpEquivalentToScalar) {
  for (double scale : {0.05, 1.0, 20.0, 100.0}) {
    const Inputs in = random_inputs(scale);
    std::vector<double> xs(kN), ys(kN), zs(kN), xv(kN), yv(kN), zv(kN);
    kernels::exp_vector_scalar(in.a.data(), in.b.data(), in.c.data(), xs.data(), ys.data(), zs.data(), kN);
    kernels::exp_vector_avx2(in.a.data(), in.b.data(), in.c.data(), xv.data(), yv.data(), zv.data(), kN);
    for (std::size_t i = 0; i < kN; ++i) {
      EXPECT_LT(rel_err(xv[i], xs[i]), 1e-12) << "scale " << scale << " lane " << i;
      EXPECT_LT(rel_err(yv[i], ys[i]), 1e-12);
      EXPECT_LT(rel_err(zv[i], zs[i]), 1e-12);
    }
  }
}

TEST_F(Avx2, FarFieldAndLowerBoundEquivalentToScalar) {
  const Inputs in = random_inputs(100);
  std::vector<double> fs(kN), fv(kN), ls(kN), lv(kN);
  kernels::far_field_scalar(in.a.data(), in.b.data(), in.c.data(), fs.data(), kN);
  kernels::far_field_avx2(in.a.data(), in.b.data(), in.c.data(), fv.data(), kN);
  kernels::lower_bound_scalar(in.a.data(), in.b.data(), in.c.data(), ls.data(), kN);
  kernels::lower_bound_avx2(in.a.data(), in.b.data(), in.c.data(), lv.data(), kN);
  for (std::size_t i = 0; i < kN; ++i) {
    EXPECT_LT(rel_err(fv[i], fs[i]), 1e-14);
    EXPECT_LT(rel_err(lv[i], ls[i]), 1e-13);
  }
}

TEST(Dispatch, OverrideSelectsLevel) {
  const SimdLevel before = active_simd_level();
  set_simd_level(SimdLevel::Scalar);
  EXPECT_EQ(active_simd_level(), SimdLevel::Scalar);
  EXPECT_EQ(to_string(SimdLevel::Scalar), "scalar");

  const Inputs in = random_inputs(10);
  std::vector<double> x1(kN), y1(kN), z1(kN), x2(kN), y2(kN), z2(kN);
  exp_vector_batch({in.a, in.b, in.c}, {x1, y1, z1});
  set_simd_level(SimdLevel::Avx2);
  EXPECT_EQ(active_simd_level(), simd_supported(SimdLevel::Avx2) ? SimdLevel::Avx2 : SimdLevel::Scalar);
  exp_vector_batch({in.a, in.b, in.c}, {x2, y2, z2});
  for (std::size_t i = 0; i < kN; ++i) EXPECT_LT(rel_err(x1[i], x2[i]), 1e-12);
  set_simd_level(before);
}

TEST(Dispatch, ScalarAlwaysSupported) {
  EXPECT_TRUE(simd_supported(SimdLevel::Scalar));
  if (!kernels::avx2_compiled()) {
    EXPECT_FALSE(simd_supported(SimdLevel::Avx2));
  }
}
