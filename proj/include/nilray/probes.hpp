#pragma once

// Numerical experiments on Nil geodesics: multiplicity of geodesics to axis
// points (conjugate points), the vertical shortcut, apparent angular size,
// and calibration of the far-field distance estimate.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilray/geodesic.hpp"
#include "nilray/march.hpp"
#include "nilray/nil.hpp"

namespace nilray::probes {

/// Geodesic from the origin reaching (0, 0, h): initial components (a, 0, c),
/// arclength t, and number of full horizontal turns.
struct AxisShot {
  double a = 0.0;
  double c = 1.0;
  double t = 0.0;
  int turns = 0;
};

struct ShootGrid {
  /// Samples of c in (0, 1].
  int c_samples = 2000;
};

/// Arclength t > 0 with z(t) = h along the geodesic (a, 0, c), c > 0.
double time_to_height(double c, double h);

/// All geodesics from the origin to (0,0,h), modulo vertical rotation, with
/// a >= 0 and phase 0. The axial geodesic is always first.
std::vector<AxisShot> shoot_to_axis_point(double h, const ShootGrid& grid = {});

struct ConjugateRow {
  double h = 0.0;
  std::vector<AxisShot> solutions;
};

std::vector<ConjugateRow> conjugate_sweep(double h_min, double h_max, int samples,
                                          const ShootGrid& grid = {});

struct ThresholdEstimate {
  double value = 0.0;
  /// Sweep bracket that contained the change before bisection.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// First h with more than one geodesic from the origin to (0,0,h): located on
/// an h-sweep and refined by bisection.
ThresholdEstimate first_conjugate_distance(const ShootGrid& grid = {}, double h_max = 20.0,
                                           int sweep_samples = 400);

struct ShortcutRow {
  double h = 0.0;
  double axial_t = 0.0;
  AxisShot best;  // shortest solution overall
};

std::vector<ShortcutRow> shortcut_sweep(double h_min, double h_max, int samples,
                                        const ShootGrid& grid = {});

/// Smallest h where some helix is strictly shorter than the axial geodesic.
ThresholdEstimate vertical_shortcut_threshold(const ShootGrid& grid = {}, double h_max = 20.0,
                                              int sweep_samples = 400);

/// Shortest shooting distance from the origin to (0,0,h).
double axis_distance(double h, const ShootGrid& grid = {});

class NoBracket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AngularOptions {
  double scan_step = 0.25 * 3.14159265358979323846 / 180.0;
  int bisection_iterations = 40;
  double eps_hit = 1e-6;
};

/// Angular radius of the central image of a sphere of radius r at the origin,
/// seen from (0, 0, -h) looking up the z-axis.
double angular_radius(double h, double r, const AngularOptions& opts = {});

/// Euclidean comparison value asin(r / h).
double euclidean_angular_radius(double h, double r);

/// True when the geodesic launched from (0,0,-h) at angle alpha from +z hits
/// the sphere of radius r centered at the origin.
bool launch_hits_sphere(double h, double r, double alpha, double eps_hit = 1e-6);

/// Shooting oracle for d(origin, p): every geodesic from the origin to p is
/// found by solving for its phase u = c t on each branch (2 pi k, 2 pi (k+1)),
/// and the shortest one is returned.
struct ShootingSolution {
  double u = 0.0;
  double t = 0.0;
  Vec3 w;  // unnormalized initial tangent, |w| = t
};
std::vector<ShootingSolution> shooting_solutions(const NilPoint& p, int max_turns = 4);
double shooting_distance(const NilPoint& p);

struct TraceRow {
  double t = 0.0;
  NilPoint closed;
  NilPoint ode;
};

/// Samples of the closed form (batch kernel) and the RK4 oracle side by side.
std::vector<TraceRow> geodesic_trace(double a, double c, double t_max, int samples,
                                     int ode_substeps = 50);

struct Calibration {
  double vertical_scale = 0.0;       // c_v
  double bilipschitz = 0.0;          // certified L
  double newton_rate = 0.0;          // fraction of near-field grid points converged
  double near_threshold = 0.0;       // T after automatic lowering
  int grid_points = 0;
  int near_points = 0;
};

/// Least-squares c_v over oracle distances to (0,0,h), h in [1, 100].
double fit_vertical_scale(int samples = 991, const ShootGrid& grid = {});

/// Log-spaced validation points with oracle distance in [lo, hi].
std::vector<NilPoint> validation_grid(int count, double lo, double hi);

/// max(F/d, d/F) over the points.
double bilipschitz_constant(const std::vector<NilPoint>& pts);

/// Near-field validation points: L_p^{-1} q with F below `threshold`.
std::vector<NilPoint> near_field_grid(int count, double threshold);

/// Fraction of near-field points where inverse_exp converges to the oracle distance.
double newton_convergence_rate(const std::vector<NilPoint>& pts);

Calibration calibrate(int grid_points = 200);

// CSV output; each file starts with '#'-prefixed parameter lines.
void write_conjugate_csv(std::ostream& out, const std::vector<ConjugateRow>& rows,
                         const ShootGrid& grid, const ThresholdEstimate& h_star);
void write_shortcut_csv(std::ostream& out, const std::vector<ShortcutRow>& rows,
                        const ShootGrid& grid, const ThresholdEstimate& h0);
struct AngularRow {
  double h;
  double r;
  double angle;
  double euclidean;
};
void write_angular_csv(std::ostream& out, const std::vector<AngularRow>& rows,
                       const AngularOptions& opts);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, double a, double c);

struct QuotientTraceRow {
  double t;
  NilPoint point;   // in the fundamental domain (rotation-invariant chart)
  HeisPoint heis;   // same point, Heisenberg chart
  std::string word; // accumulated teleport word
};
/// Follows a geodesic through the quotient, teleporting whenever it leaves
/// the fundamental domain.
std::vector<QuotientTraceRow> quotient_trace(const NilTangent& start, double t_max, int samples);
void write_quotient_trace_csv(std::ostream& out, const std::vector<QuotientTraceRow>& rows);

}  // namespace nilray::probes
