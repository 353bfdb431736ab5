// Shooting residual for the return conditions: integrate the reduced system
// from the standard initial conditions and compare the state at t = T against
// the return system, up to rotation and relabeling. Failures (inadmissible
// unknowns, collision, blow-up) map to Err = +infinity, which is the "outside
// the domain" convention the solver relies on.
#pragma once

#include "pporb/dynamics.hpp"
#include "pporb/integrator.hpp"

#include <limits>
#include <vector>

namespace pporb {

using Vec6 = Eigen::Matrix<double, 6, 1>;

// The solver's unknowns Z = (x1, x2, x3, x4, m2, T).
struct Unknowns {
  double x1;  // r1(0)
  double x2;  // r2(0)
  double x3;  // theta'(0)
  double x4;  // beta'(0)
  double m2;  // second-group mass
  double T;   // return time

  Vec6 to_vec() const {
    Vec6 z;
    z << x1, x2, x3, x4, m2, T;
    return z;
  }
  static Unknowns from_vec(const Eigen::Ref<const Eigen::VectorXd>& z) {
    return {z[0], z[1], z[2], z[3], z[4], z[5]};
  }

  // x1, x2, m2, T must be positive (and everything finite) for the residual
  // to be evaluable at all.
  bool admissible() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3) &&
           std::isfinite(x4) && std::isfinite(m2) && std::isfinite(T) &&
           x1 > 0.0 && x2 > 0.0 && m2 > 0.0 && T > 0.0;
  }

  // Initial conditions: theta(0) = beta(0) = 0, radial velocities zero.
  ReducedState initial_state() const { return {x1, x2, 0.0, 0.0, 0.0, 0.0, x3, x4}; }
};

// Which family is being solved and where theta(T) is pinned.
struct ReturnSpec {
  int n;          // 4 or 6
  double theta1;  // target theta(T), radians, unwrapped

  // Angular return constant: pi for n = 4, 2*pi/3 for n = 6.
  double offset() const { return n == 4 ? M_PI : 2.0 * M_PI / 3.0; }

  // The families are only conjectured for theta1 in these ranges; values
  // outside are legal inputs (callers may want to warn).
  bool theta1_in_conjectured_range() const {
    const double lo = M_PI / 6.0;
    const double hi = (n == 4) ? 2.0 * M_PI : M_PI;
    return theta1 >= lo - 1e-12 && theta1 <= hi + 1e-12;
  }
};

// The 8 return-condition components, in this fixed order:
//   (r1(T)-x1, r2(T)-x2, r1'(T), r2'(T), theta'(T)-x3, beta'(T)-x4,
//    theta(T)-beta(T)-offset, theta(T)-theta1)
struct Residual {
  Vec8 h = Vec8::Zero();
  bool evaluable = false;

  // sup norm of h, or +infinity when not evaluable
  double error() const {
    return evaluable ? h.cwiseAbs().maxCoeff()
                     : std::numeric_limits<double>::infinity();
  }
};

Residual residual(const Unknowns& Z, const ReturnSpec& spec,
                  const IntegratorConfig& cfg);

// Residual plus the reduced state at t = T (needed by the periodicity check).
struct ResidualWithState {
  Residual res;
  ReducedState state_T;  // meaningful iff res.evaluable
};
ResidualWithState residual_with_state(const Unknowns& Z, const ReturnSpec& spec,
                                      const IntegratorConfig& cfg);

// Err(Z): the sup norm handed to the solver, +infinity outside the domain.
double err(const Unknowns& Z, const ReturnSpec& spec, const IntegratorConfig& cfg);

// Rotate the configuration at t = T by -theta(T) and search all relabelings
// within equal-mass groups for the one closest to the initial configuration.
struct PeriodicityReport {
  bool evaluable = false;
  double max_mismatch = std::numeric_limits<double>::infinity();
  // permutation[i] = index of the rotated final body standing where initial
  // body i started (0-based). For a converged n = 4 row this is {0,1,3,2}.
  std::vector<int> permutation;
  bool within_tol = false;
};
PeriodicityReport periodicity_check(const Unknowns& Z, const ReturnSpec& spec,
                                    const IntegratorConfig& cfg, double tol);

// The rotation + relabeling comparison itself: embed both states, rotate the
// second by -sT.theta, and search within-group permutations. Exposed so the
// exact-fixed-point algebra can be checked without integrating.
PeriodicityReport match_after_rotation(const ReducedState& s0,
                                       const ReducedState& sT, MassParam m,
                                       int n, double tol);

}  // namespace pporb
