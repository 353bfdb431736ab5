// Shared helpers for the unit suites: seeded random reduced states away from
// collisions, and the two table rows quoted throughout the tests.
#pragma once

#include "pporb/dynamics.hpp"
#include "pporb/shooting.hpp"

#include <algorithm>
#include <random>

namespace pporb::testutil {

struct RandomStates {
  std::mt19937_64 engine;

  explicit RandomStates(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * ((engine() >> 11) * 0x1.0p-53);
  }

  // A state with all radii and mutual distances comfortably above the
  // collision floor, so force terms stay well conditioned.
  ReducedState state(int n) {
    for (;;) {
      ReducedState s;
      s.r1 = uniform(0.4, 2.5);
      s.r2 = uniform(0.4, 2.5);
      s.theta = uniform(-3.0, 3.0);
      s.beta = uniform(-3.0, 3.0);
      s.dr1 = uniform(-0.5, 0.5);
      s.dr2 = uniform(-0.5, 0.5);
      s.dtheta = uniform(-1.0, 1.0);
      s.dbeta = uniform(-1.0, 1.0);
      double dmin;
      if (n == 4) {
        const Distances4 d = distances4(s.r1, s.r2, s.delta());
        dmin = std::min(d.d1, d.d2);
      } else {
        const Distances6 d = distances6(s.r1, s.r2, s.delta());
        dmin = std::min({d.d1, d.d2, d.d3});
      }
      if (dmin > 0.1) return s;
    }
  }

  double mass() { return uniform(0.05, 2.5); }
};

// Table rows used as spot checks (n=4 theta1=60deg, n=6 theta1=90deg).
inline Unknowns table1_60deg() {
  return {2.723220323279, 0.857428317284, 0.462255493028, -0.754455893701,
          2.016567156421, 2.240112525938};
}
inline Unknowns table2_90deg() {
  return {1.921530148592, 1.120852152518, 0.467942444000, 0.040593915087,
          0.321032820959, 3.290981986838};
}

}  // namespace pporb::testutil
