#include "pporb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace pporb {

Eigen::ArrayXd default_box(const Eigen::VectorXd& Z0) {
  return 0.05 * Z0.array().abs().max(1.0);
}

Eigen::ArrayXd box_update_improve(const Eigen::ArrayXd& d,
                                  const Eigen::ArrayXd& delta_last,
                                  const SolverParams& p) {
  return d.max(p.c * delta_last).max(p.d_min);
}

Eigen::ArrayXd box_update_fail(const Eigen::ArrayXd& d,
                               const Eigen::ArrayXd& delta_last,
                               const SolverParams& p) {
  return (p.rho * d).max(p.c * delta_last).max(p.d_min);
}

std::vector<Eigen::VectorXd> sample_candidates(const Eigen::VectorXd& Z_best,
                                               const Eigen::ArrayXd& d, int N,
                                               UniformRng& rng) {
  const Eigen::Index n = Z_best.size();
  std::vector<Eigen::VectorXd> candidates;
  candidates.reserve(N);
  for (int j = 0; j < N; ++j) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i)
      z[i] = Z_best[i] + rng.next_in(-d[i], d[i]);
    candidates.push_back(std::move(z));
  }
  return candidates;
}

namespace {

void validate(const Eigen::VectorXd& Z0, const SolverParams& p,
              const Eigen::ArrayXd& d0, const Eigen::ArrayXd& d_min) {
  const Eigen::Index n = Z0.size();
  if (n == 0) throw std::invalid_argument("solver: empty unknown vector");
  if (d0.size() != n || d_min.size() != n)
    throw std::invalid_argument("solver: box radii dimension mismatch");
  if (!(d0 > 0.0).all() || !(d_min > 0.0).all())
    throw std::invalid_argument("solver: box radii must be positive");
  if (!(p.rho > 0.0 && p.rho < 1.0))
    throw std::invalid_argument("solver: rho must lie in (0,1)");
  if (!(p.c > 0.0)) throw std::invalid_argument("solver: c must be positive");
  if (!(p.e_g > 0.0)) throw std::invalid_argument("solver: e_g must be positive");
  if (p.N < 1 || p.L_max < 1)
    throw std::invalid_argument("solver: N and L_max must be at least 1");
}

void evaluate_all(const Objective& objective,
                  const std::vector<Eigen::VectorXd>& candidates,
                  std::vector<double>& errors, int threads) {
  const int N = static_cast<int>(candidates.size());
  errors.resize(N);
  if (threads <= 1 || N < 2 * threads) {
    for (int j = 0; j < N; ++j) errors[j] = objective(candidates[j]);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int j = w; j < N; j += threads) errors[j] = objective(candidates[j]);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SolverResult solve(const Objective& objective, const Eigen::VectorXd& Z0,
                   const SolverParams& p) {
  const Eigen::Index n = Z0.size();
  const Eigen::ArrayXd d_min =
      p.d_min.size() ? p.d_min
                     : Eigen::ArrayXd::Constant(n, SolverParams::kDefaultDmin);
  const Eigen::ArrayXd d0 = p.d0.size() ? p.d0 : default_box(Z0);
  validate(Z0, p, d0, d_min);

  const int threads =
      p.threads > 0
          ? p.threads
          : std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));

  SolverParams eff = p;
  eff.d0 = d0;
  eff.d_min = d_min;

  UniformRng rng(p.seed);
  SolverResult result;
  result.Z_best = Z0;
  result.e_best = objective(Z0);
  result.evals_used = 1;

  Eigen::ArrayXd d = d0.max(d_min);
  Eigen::ArrayXd delta_last = Eigen::ArrayXd::Zero(n);

  if (result.e_best < p.e_g) {  // already solved, no sampling needed
    result.converged = true;
    result.d_final = d;
    return result;
  }

  std::vector<double> errors;
  for (int iter = 1; iter <= p.L_max; ++iter) {
    result.iterations_used = iter;
    const auto candidates = sample_candidates(result.Z_best, d, p.N, rng);
    evaluate_all(objective, candidates, errors, threads);
    result.evals_used += p.N;

    int best_j = 0;
    for (int j = 1; j < p.N; ++j)
      if (errors[j] < errors[best_j]) best_j = j;
    const double e_sample = errors[best_j];

    if (e_sample < result.e_best) {
      delta_last = (candidates[best_j] - result.Z_best).array().abs();
      result.Z_best = candidates[best_j];
      result.e_best = e_sample;
      d = box_update_improve(d, delta_last, eff);
    } else {
      d = box_update_fail(d, delta_last, eff);
    }
    if (p.record_trace) result.trace.push_back({iter, result.e_best, d});
    if (result.e_best < p.e_g) break;
  }

  result.converged = result.e_best < p.e_g;
  result.d_final = d;
  return result;
}

}  // namespace pporb
