#include "nilray/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nilray {

NilTangent ShootResult::direction() const {
  if (t == 0.0) return {w.base, {}};
  return {w.base, w.v / t};
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  Vec3 w;
  int iterations = 0;
};

Mat3 jacobian(const Vec3& w) {
  const double h = 1e-6 * std::fmax(1.0, norm(w));
  Mat3 j;
  for (int k = 0; k < 3; ++k) {
    Vec3 wp = w, wm = w;
    wp[k] += h;
    wm[k] -= h;
    const Vec3 d = (exp_vector(wp).coords() - exp_vector(wm).coords()) / (2.0 * h);
    j.set_column(k, d);
  }
  return j;
}

NewtonOutcome newton(const Vec3& target, Vec3 w, const ShootOptions& opts) {
  NewtonOutcome out;
  const double tol = opts.tolerance * std::fmax(1.0, norm(target));
  Vec3 r = exp_vector(w).coords() - target;
  double rn = norm(r);
  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it + 1;
    if (rn <= tol) break;
    Vec3 step;
    if (!solve3(jacobian(w), -r, step)) return out;
    double alpha = 1.0;
    Vec3 w_next = w + step;
    Vec3 r_next = exp_vector(w_next).coords() - target;
    double rn_next = norm(r_next);
    for (int ls = 0; ls < 30 && !(rn_next < rn); ++ls) {
      alpha *= 0.5;
      w_next = w + step * alpha;
      r_next = exp_vector(w_next).coords() - target;
      rn_next = norm(r_next);
    }
    if (!(rn_next < rn)) break;
    w = w_next;
    r = r_next;
    rn = rn_next;
  }
  out.w = w;
  out.converged = rn <= tol;
  return out;
}

}  // namespace

ShootResult inverse_exp(const NilPoint& p, const NilPoint& q, const ShootOptions& opts) {
  const Vec3 target = group_mul(group_inv(p), q).coords();
  ShootResult res;
  res.w.base = p;
  if (target == Vec3{}) {
    res.status = ShootStatus::Converged;
    return res;
  }

  const NewtonOutcome first = newton(target, target, opts);
  NewtonOutcome second;
  if (opts.restart) {
    // One fixed-point step from the coordinate guess: exp(w) = w + O(|w|^2).
    const Vec3 guess = target * 2.0 - exp_vector(target).coords();
    second = newton(target, guess, opts);
  }

  res.iterations = first.iterations + second.iterations;
  if (!first.converged && !second.converged) {
    res.status = ShootStatus::NoConvergence;
    res.w.v = first.w;
    res.t = norm(first.w);
    return res;
  }

  Vec3 w = first.converged ? first.w : second.w;
  res.status = ShootStatus::Converged;
  if (first.converged && second.converged) {
    const double na = norm(first.w), nb = norm(second.w);
    if (norm(first.w - second.w) > 1e-6 * std::fmax(1.0, na)) {
      res.status = ShootStatus::AmbiguousNearCutLocus;
      w = na <= nb ? first.w : second.w;
    }
  }
  res.w.v = w;
  res.t = norm(w);
  return res;
}

double distance(const NilPoint& p, const NilPoint& q) {
  const NilPoint rel = group_mul(group_inv(p), q);
  const double f = far_field_estimate(rel);
  if (f >= kNearFieldThreshold) return f;
  const ShootResult s = inverse_exp(p, q);
  return s.ok() ? s.t : f;
}

double conservative_distance(const NilPoint& p, const NilPoint& q) {
  const NilPoint rel = group_mul(group_inv(p), q);
  const double bound = distance_lower_bound(rel);
  if (bound >= kNearFieldThreshold) return bound;
  ShootOptions opts;
  opts.restart = false;
  const ShootResult s = inverse_exp(p, q, opts);
  // Anything past the first conjugate point (|u| >= 2pi needs t >= 2pi) is not
  // the minimizer; keep the bound instead of risking an overestimate.
  if (!s.ok() || s.t >= 2.0 * std::numbers::pi) return bound;
  return std::fmax(bound, std::fmin(s.t, 2.0 * kNearFieldThreshold - bound));
}

}  // namespace nilray
