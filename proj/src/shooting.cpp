#include "pporb/shooting.hpp"

#include <algorithm>
#include <cmath>

namespace pporb {

ResidualWithState residual_with_state(const Unknowns& Z, const ReturnSpec& spec,
                                      const IntegratorConfig& cfg) {
  ResidualWithState out;
  if (!Z.admissible()) return out;

  const ReducedRhs rhs{spec.n, Z.m2, cfg.collision_floor};
  const auto run = integrate(rhs, Z.initial_state().to_vec(), Z.T, cfg);
  if (!run.completed()) return out;

  const ReducedState s = ReducedState::from_vec(*run.final_state);
  out.res.h << s.r1 - Z.x1, s.r2 - Z.x2, s.dr1, s.dr2, s.dtheta - Z.x3,
      s.dbeta - Z.x4, s.theta - s.beta - spec.offset(), s.theta - spec.theta1;
  out.res.evaluable = out.res.h.allFinite();
  out.state_T = s;
  return out;
}

Residual residual(const Unknowns& Z, const ReturnSpec& spec,
                  const IntegratorConfig& cfg) {
  return residual_with_state(Z, spec, cfg).res;
}

double err(const Unknowns& Z, const ReturnSpec& spec, const IntegratorConfig& cfg) {
  return residual(Z, spec, cfg).error();
}

namespace {

// Largest componentwise position/velocity difference between rotated final
// body `perm[i]` and initial body `i`.
double permutation_mismatch(const CartesianState& initial,
                            const std::vector<Vec2>& rot_pos,
                            const std::vector<Vec2>& rot_vel,
                            const std::vector<int>& perm) {
  double worst = 0.0;
  for (size_t i = 0; i < perm.size(); ++i) {
    const Vec2 dp = rot_pos[perm[i]] - initial.positions[i];
    const Vec2 dv = rot_vel[perm[i]] - initial.velocities[i];
    worst = std::max({worst, std::abs(dp.x()), std::abs(dp.y()),
                      std::abs(dv.x()), std::abs(dv.y())});
  }
  return worst;
}

}  // namespace

PeriodicityReport periodicity_check(const Unknowns& Z, const ReturnSpec& spec,
                                    const IntegratorConfig& cfg, double tol) {
  const auto rws = residual_with_state(Z, spec, cfg);
  if (!rws.res.evaluable) return {};
  return match_after_rotation(Z.initial_state(), rws.state_T, MassParam{Z.m2},
                              spec.n, tol);
}

PeriodicityReport match_after_rotation(const ReducedState& s0,
                                       const ReducedState& sT, MassParam m,
                                       int n, double tol) {
  PeriodicityReport rep;
  rep.evaluable = true;

  const CartesianState c0 = embed_cartesian(s0, m, n);
  const CartesianState cT = embed_cartesian(sT, m, n);

  // Rotate everything at t = T back by -theta(T).
  const Eigen::Rotation2Dd back(-sT.theta);
  std::vector<Vec2> rot_pos(n), rot_vel(n);
  for (int i = 0; i < n; ++i) {
    rot_pos[i] = back * cT.positions[i];
    rot_vel[i] = back * cT.velocities[i];
  }

  // Brute-force search over relabelings that stay within the equal-mass
  // groups {0..half-1} and {half..n-1}.
  const int half = n / 2;
  std::vector<int> g1(half), g2(half);
  for (int i = 0; i < half; ++i) {
    g1[i] = i;
    g2[i] = half + i;
  }
  std::vector<int> perm(n);
  do {
    std::vector<int> g2copy = g2;
    do {
      for (int i = 0; i < half; ++i) {
        perm[i] = g1[i];
        perm[half + i] = g2copy[i];
      }
      const double mm = permutation_mismatch(c0, rot_pos, rot_vel, perm);
      if (mm < rep.max_mismatch) {
        rep.max_mismatch = mm;
        rep.permutation = perm;
      }
    } while (std::next_permutation(g2copy.begin(), g2copy.end()));
  } while (std::next_permutation(g1.begin(), g1.end()));

  rep.within_tol = rep.max_mismatch <= tol;
  return rep;
}

}  // namespace pporb
