#pragma once

// Distances on Nil.
//
// Far from the origin d(o, p) is replaced by the cheap estimate
//   F(p) = max(rho, c_v sqrt|z|),  rho = sqrt(x^2 + y^2),
// which is bilipschitz to d with constant kBilipschitzL on the validation grid.
// Near the origin the exact distance is found by shooting: Newton's method on
// the tangent w with exp(w) = p.
//
// For sphere tracing a value that never exceeds the true distance and is
// 1-Lipschitz is needed. For a function f(|z|, rho) the metric gradient is
//   |grad f|^2 = f_rho^2 + (1 + rho^2/4) f_z^2.
// distance_lower_bound() is max(rho, g) with
//   g = 2 sqrt(P (P + |z| + rho/2)) - 2P - rho/2,
// and with P = kLowerBoundScale the gradient of g has norm <= 1 wherever
// g >= rho. The max is therefore 1-Lipschitz and vanishes at the origin, so it
// is bounded by d(o, p). It grows like 2 sqrt(P |z|) along the axis.

#include <cmath>
#include <numbers>

#include "nilray/geodesic.hpp"
#include "nilray/nil.hpp"

namespace nilray {

/// Least-squares fit of c_v against shooting distances to (0,0,h), h in [1, 100].
inline constexpr double kVerticalScale = 3.4320856;

/// Far-field/near-field switch on F.
inline constexpr double kNearFieldThreshold = 2.0;

/// Certified max(F/d, d/F) over the validation grid (distances in [T, 50]).
inline constexpr double kBilipschitzL = 2.32;

inline double far_field_estimate(const NilPoint& p) {
  return std::fmax(std::hypot(p.x, p.y), kVerticalScale * std::sqrt(std::fabs(p.z)));
}

/// Largest P with the gradient bound above (the limit is 1.299 as rho grows).
inline constexpr double kLowerBoundScale = 1.29;

inline double distance_lower_bound(const NilPoint& p) {
  constexpr double P = kLowerBoundScale;
  const double rho = std::hypot(p.x, p.y);
  const double g = 2.0 * std::sqrt(P * (P + std::fabs(p.z) + 0.5 * rho)) - 2.0 * P - 0.5 * rho;
  return std::fmax(rho, g);
}

enum class ShootStatus { Converged, NoConvergence, AmbiguousNearCutLocus };

struct ShootResult {
  ShootStatus status = ShootStatus::NoConvergence;
  /// Unnormalized tangent at the source; |w| is the arclength.
  NilTangent w;
  double t = 0.0;
  int iterations = 0;

  bool ok() const { return status != ShootStatus::NoConvergence; }
  /// Unit initial direction (zero vector when t == 0).
  NilTangent direction() const;
};

struct ShootOptions {
  int max_iterations = 32;
  double tolerance = 1e-13;
  /// Second Newton start used to detect cut-locus ambiguity.
  bool restart = true;
};

/// Tangent w at p with exp(w/|w|, |w|) = q, found by damped Newton with a
/// finite-difference Jacobian from the initial guess L_p^{-1}(q).
ShootResult inverse_exp(const NilPoint& p, const NilPoint& q, const ShootOptions& opts = {});

/// Hybrid distance: F(L_p^{-1} q) when it is at least kNearFieldThreshold,
/// Newton arclength otherwise (F again if Newton fails).
double distance(const NilPoint& p, const NilPoint& q);

/// 1-Lipschitz distance that never exceeds d(p, q): with b the lower bound and
/// d the Newton arclength, max(b, min(d, 2T - b)). Equal to d near p, to b
/// once b >= T.
double conservative_distance(const NilPoint& p, const NilPoint& q);

}  // namespace nilray
