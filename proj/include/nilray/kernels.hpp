#pragma once

// Batch kernels for data-parallel geodesic evaluation.
//
// Each kernel has a scalar reference implementation and an AVX2 variant; the
// variant is chosen once at runtime from CPUID and can be pinned with the
// NILRAY_SIMD environment variable ("scalar" or "avx2") or set_simd_level().
// All inputs and outputs are structure-of-arrays spans of equal length.

#include <cstddef>
#include <span>
#include <string_view>

namespace nilray {

enum class SimdLevel { Scalar, Avx2 };

std::string_view to_string(SimdLevel level);

/// True when the CPU and the build both support the level.
bool simd_supported(SimdLevel level);

/// Level used by the dispatching entry points below.
SimdLevel active_simd_level();

/// Overrides the dispatch level. Unsupported levels fall back to Scalar.
void set_simd_level(SimdLevel level);

/// Unnormalized tangent components at the origin, one entry per lane.
struct TangentBatch {
  std::span<const double> w1, w2, w3;
  std::size_t size() const { return w1.size(); }
};

struct PointBatch {
  std::span<double> x, y, z;
  std::size_t size() const { return x.size(); }
};

/// exp at the origin of the tangent (w1, w2, w3): point reached after
/// arclength |w| from the origin in direction w/|w|.
void exp_vector_batch(const TangentBatch& in, const PointBatch& out);

/// Far-field estimate max(rho, c_v sqrt|z|) per point.
void far_field_batch(std::span<const double> x, std::span<const double> y,
                     std::span<const double> z, std::span<double> out);

/// Certified lower bound of d(origin, p) per point.
void distance_lower_bound_batch(std::span<const double> x, std::span<const double> y,
                                std::span<const double> z, std::span<double> out);

namespace kernels {

// Direct entry points, used by the equivalence tests.
void exp_vector_scalar(const double* w1, const double* w2, const double* w3, double* x, double* y,
                       double* z, std::size_t n);
void far_field_scalar(const double* x, const double* y, const double* z, double* out,
                      std::size_t n);
void lower_bound_scalar(const double* x, const double* y, const double* z, double* out,
                        std::size_t n);

void exp_vector_avx2(const double* w1, const double* w2, const double* w3, double* x, double* y,
                     double* z, std::size_t n);
void far_field_avx2(const double* x, const double* y, const double* z, double* out,
                    std::size_t n);
void lower_bound_avx2(const double* x, const double* y, const double* z, double* out,
                      std::size_t n);
void sincos_avx2(const double* in, double* s, double* c, std::size_t n);

bool avx2_compiled();

}  // namespace kernels
}  // namespace nilray
