#pragma once

// The closed Nil-manifold obtained as the mapping torus of the Dehn twist
// [[1,1],[0,1]]: the quotient of Nil by the integer Heisenberg lattice, with
// the half-open unit cube [0,1)^3 of the Heisenberg chart as fundamental domain.

#include <vector>

#include "nilray/lattice.hpp"
#include "nilray/march.hpp"
#include "nilray/nil.hpp"
#include "nilray/scene.hpp"

namespace nilray {

bool in_domain(const HeisPoint& p);

struct TeleportResult {
  HeisPoint point;
  LatticeWord word;
};

/// Shear first: x into [0,1) with the x generator, then y, then z.
TeleportResult teleport(const HeisPoint& p);

/// Same algorithm with the z phase run before the y phase.
TeleportResult teleport_z_first(const HeisPoint& p);

struct TeleportedState {
  NilPoint point;
  NilTangent tangent;
  LatticeWord word;
};

/// Teleports a point and carries a tangent along with the differential of the
/// applied lattice translation (frame components are unchanged).
TeleportedState teleport_state(const NilPoint& p, const NilTangent& v);

/// Width of the band around the unit cube a march step may enter before teleporting.
inline constexpr double kTeleportCushion = 0.1;

/// Longest single sphere-tracing step in the quotient.
inline constexpr double kQuotientMaxStep = 0.5;

/// Lattice translates of each object that are checked by the quotient sdf.
struct QuotientCopy {
  HeisPoint element;  // integer Heisenberg point
  LatticeWord word;
};
const std::vector<QuotientCopy>& quotient_neighbourhood();

struct QuotientSdfSample {
  double value;
  int object;
  int copy;  // index into quotient_neighbourhood()
};

/// Sdf of the periodically lifted scene near the fundamental domain.
QuotientSdfSample quotient_sdf(const Scene& s, const NilPoint& p);

/// Throws std::invalid_argument naming the first object whose center is
/// outside the fundamental domain.
void validate_quotient_scene(const Scene& s);

/// Sphere tracing in the quotient. The ray is teleported back into the domain
/// whenever it leaves; the Hit (or Miss) records the lattice word.
MarchOutcome march_quotient(const Scene& s, const NilTangent& v, const MarchConfig& cfg);

}  // namespace nilray
