#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "leafwalk/hypgeom.hpp"
#include "leafwalk/word.hpp"

namespace leafwalk::lattice {

using hypgeom::Complex;
using hypgeom::HPoint;
using hypgeom::Isometry;

struct OrbitPoint {
  Word word;
  HPoint position;
};

// Result of fundamental-domain tracking: `word` names the domain copy and
// `local` is word^-1 applied to the tracked point.
struct Located {
  Word word;
  Complex local;
};

// Side geodesics of the fundamental domain, in half-plane coordinates.
enum class Side { kRightLine, kLeftLine, kRightCircle, kLeftCircle };

// The level-2 congruence group: free on A = [[1,2],[0,1]], B = [[1,0],[2,1]],
// with the ideal quadrilateral |Re z| <= 1, |2z - 1| >= 1, |2z + 1| >= 1 as
// fundamental domain. Immutable after construction.
class GroupAtlas {
 public:
  // Builds the atlas and verifies side pairings and freeness; throws
  // std::logic_error if a check fails.
  static GroupAtlas build_gamma2();

  const Isometry& generator(char letter) const;
  HPoint base_point() const { return hypgeom::origin(); }

  Isometry word_to_isometry(const Word& w) const;
  HPoint orbit_point(const Word& w) const;

  // Closed-domain membership, with slack `tol` in half-plane coordinates.
  bool in_domain(const HPoint& p, double tol = 1e-12) const;
  bool in_domain_disc(Complex z, double tol = 1e-12) const;

  // Hyperbolic distance from p to the closed fundamental domain, computed
  // exactly from the four complete side geodesics.
  double distance_to_domain(const HPoint& p) const;
  static double distance_to_side(Complex half_plane_point, Side side);

  std::vector<OrbitPoint> orbit_enumerate(int max_len) const;
  double min_displacement(int max_len) const;

  // Word w with w^-1 z in the fundamental domain, reached from `hint` by side
  // pairings (whole parabolic powers at once deep in a cusp). Throws
  // GeometryError after 10^4 reduction steps.
  Word locate(const HPoint& z, const Word& hint) const;
  Located locate_disc(Complex z, const Word& hint = Word()) const;

  // Words w whose ball B(w p0, R) meets the R-neighbourhood of the domain,
  // in shortlex order.
  std::vector<Word> contact_list(double R) const;

  // Verification helpers exposed for tests.
  double max_side_pairing_error(int samples_per_side) const;
  bool free_up_to(int max_len) const;

 private:
  GroupAtlas();

  std::array<Isometry, 4> generators_;  // A, a, B, b
};

}  // namespace leafwalk::lattice
