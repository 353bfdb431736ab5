// Adaptive stochastic black-box equation solver. Maintains an incumbent
// Z_best and an anisotropic box radius d; each iteration draws N uniform
// candidates in the box, keeps the best, and updates d componentwise using
// the last accepted displacement (the learning term), never letting the box
// collapse below d_min. Works on any objective mapping R^n to [0, +inf];
// +inf marks points outside the objective's domain.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace pporb {

// Uniform deviates from a mt19937_64 engine (bit-exact sequence by the
// standard's definition, so runs reproduce across platforms). Doubles take
// the top 53 bits of each draw.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

  double next_unit() { return (engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::mt19937_64 engine_;
};

struct SolverParams {
  Eigen::ArrayXd d0;     // initial box radii; empty = derive from Z0
  Eigen::ArrayXd d_min;  // minimum radii; empty = kDefaultDmin everywhere
  double rho = 0.9;      // shrink factor, in (0,1)
  double c = 0.9;        // scaling of the learning term, > 0
  double e_g = 1e-7;     // target error
  int N = 800;           // candidates per iteration
  int L_max = 300;       // iteration cap
  std::uint64_t seed = 0;
  int threads = 0;  // parallel candidate evaluation; 0 = hardware default
  bool record_trace = false;

  static constexpr double kDefaultDmin = 1e-12;
};

// Default initial radii for an orbit unknown: 5% of the coordinate scale.
Eigen::ArrayXd default_box(const Eigen::VectorXd& Z0);

struct SolverTracePoint {
  int iteration;
  double e_best;
  Eigen::ArrayXd d;
};

struct SolverResult {
  Eigen::VectorXd Z_best;
  double e_best = 0.0;
  int iterations_used = 0;
  long evals_used = 0;
  bool converged = false;  // e_best < e_g
  Eigen::ArrayXd d_final;
  std::vector<SolverTracePoint> trace;  // filled iff record_trace
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Case A (improvement): d <- max(d, c*delta_last, d_min) componentwise.
Eigen::ArrayXd box_update_improve(const Eigen::ArrayXd& d,
                                  const Eigen::ArrayXd& delta_last,
                                  const SolverParams& p);

// Case B (no improvement): d <- max(rho*d, c*delta_last, d_min) componentwise.
Eigen::ArrayXd box_update_fail(const Eigen::ArrayXd& d,
                               const Eigen::ArrayXd& delta_last,
                               const SolverParams& p);

// N candidates Z_best + xi, xi_i ~ Unif[-d_i, d_i]. The RNG is consumed in
// candidate-major, coordinate-minor order.
std::vector<Eigen::VectorXd> sample_candidates(const Eigen::VectorXd& Z_best,
                                               const Eigen::ArrayXd& d, int N,
                                               UniformRng& rng);

// Run the solver. Deterministic for a fixed seed (candidate evaluation may
// run on several threads; the selected candidate is the lowest-index
// minimum, which does not depend on evaluation order). Throws
// std::invalid_argument on malformed parameters; the objective itself is
// never allowed to abort a run (+inf encodes failure).
SolverResult solve(const Objective& objective, const Eigen::VectorXd& Z0,
                   const SolverParams& p);

}  // namespace pporb
