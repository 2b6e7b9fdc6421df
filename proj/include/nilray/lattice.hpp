#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nilray/nil.hpp"

namespace nilray {

/// Side pairings of the unit cube: left translations by (1,0,0), (0,1,0) and
/// (0,0,1) in the Heisenberg chart.
enum class Generator : std::int8_t { X = 1, Y = 2, Z = 3 };

struct LatticeStep {
  Generator generator = Generator::X;
  std::int8_t sign = 1;

  /// Signed generator index (+-1, +-2, +-3).
  int index() const { return sign * static_cast<int>(generator); }
  bool operator==(const LatticeStep&) const = default;
};

/// Steps listed in the order they are applied: [s1, s2] maps p to s2(s1(p)).
using LatticeWord = std::vector<LatticeStep>;

/// Left multiplication by a generator power +-1 in the Heisenberg chart.
constexpr HeisPoint apply_step(const LatticeStep& s, const HeisPoint& p) {
  const double e = s.sign;
  switch (s.generator) {
    case Generator::X: return {p.x + e, p.y, p.z + e * p.y};
    case Generator::Y: return {p.x, p.y + e, p.z};
    case Generator::Z: return {p.x, p.y, p.z + e};
  }
  return p;
}

HeisPoint apply_word(const LatticeWord& w, const HeisPoint& p);
LatticeWord inverse_word(const LatticeWord& w);

/// Lattice element represented by the word, as an integer Heisenberg point g
/// with apply_word(w, p) = g * p.
HeisPoint word_element(const LatticeWord& w);

/// Word x^i y^j z^m realizing the integer element (i, j, k).
LatticeWord element_word(int i, int j, int k);

/// "x^-1 z" style rendering; "e" for the empty word.
std::string to_string(const LatticeWord& w);

struct LatticeGroup {
  /// Monodromy of the torus bundle acting on the (z, y) fiber lattice:
  /// conjugation by the x generator sends y -> y z and fixes z.
  std::array<std::array<int, 2>, 2> monodromy{{{1, 1}, {0, 1}}};

  static NilIsometry generator_isometry(Generator g);
};

}  // namespace nilray
