#include <cmath>

#include "nilray/distance.hpp"
#include "nilray/geodesic.hpp"
#include "nilray/kernels.hpp"

namespace nilray::kernels {

void exp_vector_scalar(const double* w1, const double* w2, const double* w3, double* x, double* y,
                       double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const NilPoint p = exp_vector({w1[i], w2[i], w3[i]});
    x[i] = p.x;
    y[i] = p.y;
    z[i] = p.z;
  }
}

void far_field_scalar(const double* x, const double* y, const double* z, double* out,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = far_field_estimate({x[i], y[i], z[i]});
}

void lower_bound_scalar(const double* x, const double* y, const double* z, double* out,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = distance_lower_bound({x[i], y[i], z[i]});
}

}  // namespace nilray::kernels
