#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nilray/kernels.hpp"

namespace nilray {

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::Scalar: return "scalar";
    case SimdLevel::Avx2: return "avx2";
  }
  return "unknown";
}

bool simd_supported(SimdLevel level) {
  if (level == SimdLevel::Scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
  if (level == SimdLevel::Avx2)
    return kernels::avx2_compiled() && __builtin_cpu_supports("avx2") &&
           __builtin_cpu_supports("fma");
#endif
  return false;
}

namespace {

SimdLevel detect_level() {
  if (const char* env = std::getenv("NILRAY_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return SimdLevel::Scalar;
    if (v == "avx2" && simd_supported(SimdLevel::Avx2)) return SimdLevel::Avx2;
  }
  return simd_supported(SimdLevel::Avx2) ? SimdLevel::Avx2 : SimdLevel::Scalar;
}

std::atomic<SimdLevel>& level_slot() {
  static std::atomic<SimdLevel> slot{detect_level()};
  return slot;
}

void check_sizes(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  if (a != b || a != c || a != d) throw std::invalid_argument("batch spans differ in length");
}

}  // namespace

SimdLevel active_simd_level() { return level_slot().load(std::memory_order_relaxed); }

void set_simd_level(SimdLevel level) {
  level_slot().store(simd_supported(level) ? level : SimdLevel::Scalar, std::memory_order_relaxed);
}

void exp_vector_batch(const TangentBatch& in, const PointBatch& out) {
  const std::size_t n = in.size();
  check_sizes(n, in.w2.size(), in.w3.size(), out.size());
  check_sizes(n, out.x.size(), out.y.size(), out.z.size());
  if (active_simd_level() == SimdLevel::Avx2)
    kernels::exp_vector_avx2(in.w1.data(), in.w2.data(), in.w3.data(), out.x.data(), out.y.data(),
                             out.z.data(), n);
  else
    kernels::exp_vector_scalar(in.w1.data(), in.w2.data(), in.w3.data(), out.x.data(),
                               out.y.data(), out.z.data(), n);
}

void far_field_batch(std::span<const double> x, std::span<const double> y,
                     std::span<const double> z, std::span<double> out) {
  check_sizes(x.size(), y.size(), z.size(), out.size());
  if (active_simd_level() == SimdLevel::Avx2)
    kernels::far_field_avx2(x.data(), y.data(), z.data(), out.data(), x.size());
  else
    kernels::far_field_scalar(x.data(), y.data(), z.data(), out.data(), x.size());
}

void distance_lower_bound_batch(std::span<const double> x, std::span<const double> y,
                                std::span<const double> z, std::span<double> out) {
  check_sizes(x.size(), y.size(), z.size(), out.size());
  if (active_simd_level() == SimdLevel::Avx2)
    kernels::lower_bound_avx2(x.data(), y.data(), z.data(), out.data(), x.size());
  else
    kernels::lower_bound_scalar(x.data(), y.data(), z.data(), out.data(), x.size());
}

}  // namespace nilray
