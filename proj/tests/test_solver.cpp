#include "pporb/solver.hpp"

#include <cmath>
#include <limits>

#include "doctest.h"

using namespace pporb;

namespace {

Eigen::ArrayXd arr1(double v) { return Eigen::ArrayXd::Constant(1, v); }

SolverParams toy_params(std::uint64_t seed) {
  SolverParams p;
  p.d0 = Eigen::ArrayXd::Constant(2, 1.0);
  p.d_min = Eigen::ArrayXd::Constant(2, 1e-12);
  p.rho = 0.9;
  p.c = 0.9;
  p.e_g = 1e-9;
  p.N = 64;
  p.L_max = 500;
  p.seed = seed;
  p.threads = 1;
  return p;
}

const Objective kCorner = [](const Eigen::VectorXd& z) {
  return std::max(std::abs(z[0] - 3.0), std::abs(z[1] + 1.0));
};

}  // namespace

TEST_CASE("box update, improvement case") {
  SolverParams p;
  p.c = 0.9;
  p.rho = 0.9;
  p.d_min = arr1(0.01);
  CHECK(box_update_improve(arr1(0.1), arr1(0.5), p)(0) == doctest::Approx(0.45));

  p.d_min = arr1(1e-12);
  CHECK(box_update_improve(arr1(0.1), arr1(0.0), p)(0) == 0.1);

  CHECK(box_update_improve(arr1(1e-13), arr1(0.0), p)(0) == 1e-12);
}

TEST_CASE("box update, failure case") {
  SolverParams p;
  p.c = 0.9;
  p.rho = 0.9;
  p.d_min = arr1(1e-12);
  CHECK(box_update_fail(arr1(0.1), arr1(0.0), p)(0) == doctest::Approx(0.09));

  // the learning term dominates the geometric shrink
  CHECK(box_update_fail(arr1(0.1), arr1(0.5), p)(0) == doctest::Approx(0.45));

  // repeated failures with no memory: d_k = max(rho^k d0, d_min)
  Eigen::ArrayXd d = arr1(0.1);
  for (int k = 1; k <= 5; ++k) {
    d = box_update_fail(d, arr1(0.0), p);
    CHECK(d(0) == doctest::Approx(0.1 * std::pow(0.9, k)).epsilon(1e-12));
  }
}

TEST_CASE("toy corner objective: at least 2 of 3 seeds converge") {
  int successes = 0;
  for (const std::uint64_t seed : {42ull, 43ull, 44ull}) {
    const auto result = solve(kCorner, Eigen::Vector2d(0.0, 0.0), toy_params(seed));
    if (result.converged) {
      ++successes;
      CHECK(std::abs(result.Z_best[0] - 3.0) < 1e-9);
      CHECK(std::abs(result.Z_best[1] + 1.0) < 1e-9);
      CHECK(result.e_best < 1e-9);
    }
  }
  CHECK(successes >= 2);
}

TEST_CASE("already-solved input returns untouched at iteration zero") {
  const Objective zero = [](const Eigen::VectorXd&) { return 0.0; };
  const Eigen::Vector2d z0(4.0, 5.0);
  const auto result = solve(zero, z0, toy_params(7));
  CHECK(result.converged);
  CHECK(result.iterations_used == 0);
  CHECK(result.evals_used == 1);
  CHECK(result.Z_best == z0);
}

TEST_CASE("objective that always fails") {
  const Objective never = [](const Eigen::VectorXd&) {
    return std::numeric_limits<double>::infinity();
  };
  SolverParams p = toy_params(11);
  p.L_max = 5;
  const Eigen::Vector2d z0(1.0, 2.0);
  const auto result = solve(never, z0, p);
  CHECK(!result.converged);
  CHECK(std::isinf(result.e_best));
  CHECK(result.Z_best == z0);
  CHECK(result.evals_used == 5 * 64 + 1);
  // pure geometric shrinking: d = rho^5 d0 (still above d_min)
  CHECK(result.d_final(0) == doctest::Approx(std::pow(0.9, 5)).epsilon(1e-12));
}

TEST_CASE("fixed seed gives bitwise-identical runs, independent of threads") {
  SolverParams p1 = toy_params(123);
  SolverParams p2 = toy_params(123);
  p2.threads = 2;
  const auto a = solve(kCorner, Eigen::Vector2d(0.0, 0.0), p1);
  const auto b = solve(kCorner, Eigen::Vector2d(0.0, 0.0), p2);
  CHECK(a.Z_best == b.Z_best);
  CHECK(a.e_best == b.e_best);
  CHECK(a.evals_used == b.evals_used);
  CHECK(a.iterations_used == b.iterations_used);
  CHECK((a.d_final == b.d_final).all());
}

TEST_CASE("evaluation budget and monotone error trace") {
  long calls = 0;
  const Objective counted = [&calls](const Eigen::VectorXd& z) {
    ++calls;
    return std::max(std::abs(z[0] - 0.37), std::abs(z[1] - 0.11));
  };
  SolverParams p = toy_params(5);
  p.L_max = 40;
  p.record_trace = true;
  const auto result = solve(counted, Eigen::Vector2d(0.0, 0.0), p);
  CHECK(calls == result.evals_used);
  CHECK(result.evals_used <= 40L * p.N + 1);

  REQUIRE(!result.trace.empty());
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& tp : result.trace) {
    CHECK(tp.e_best <= prev);
    prev = tp.e_best;
    CHECK((tp.d >= p.d_min - 1e-300).all());
  }
}

TEST_CASE("box never drops below d_min even with tiny d0") {
  SolverParams p = toy_params(9);
  p.d0 = Eigen::ArrayXd::Constant(2, 1e-13);
  p.d_min = Eigen::ArrayXd::Constant(2, 1e-12);
  p.L_max = 3;
  p.record_trace = true;
  const auto result = solve(kCorner, Eigen::Vector2d(0.0, 0.0), p);
  CHECK((result.d_final >= 1e-12).all());
  for (const auto& tp : result.trace) CHECK((tp.d >= 1e-12).all());
}

TEST_CASE("candidate sampling: bounds, order, and statistics") {
  const Eigen::Vector2d center(2.0, -1.0);
  const Eigen::ArrayXd d = (Eigen::ArrayXd(2) << 0.5, 0.25).finished();

  // fixed seed: identical lists
  UniformRng r1(77), r2(77);
  const auto a = sample_candidates(center, d, 10, r1);
  const auto b = sample_candidates(center, d, 10, r2);
  REQUIRE(a.size() == 10);
  for (int j = 0; j < 10; ++j) CHECK(a[j] == b[j]);

  // candidate-major, coordinate-minor draw order
  UniformRng r3(77), r4(77);
  const auto list = sample_candidates(center, d, 3, r3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 2; ++i) {
      const double expected = center[i] + r4.next_in(-d[i], d[i]);
      CHECK(list[j][i] == expected);
    }

  // statistics over a large draw
  UniformRng r5(123456);
  const int N = 100000;
  const auto big = sample_candidates(center, d, N, r5);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& z : big) {
    for (int i = 0; i < 2; ++i) {
      CHECK(z[i] >= center[i] - d[i]);
      CHECK(z[i] <= center[i] + d[i]);
    }
    mean += z;
  }
  mean /= N;
  for (int i = 0; i < 2; ++i) {
    const double sigma = d[i] / std::sqrt(3.0) / std::sqrt(double(N));
    CHECK(std::abs(mean[i] - center[i]) < 3.0 * sigma);
  }
}

TEST_CASE("parameter validation") {
  SolverParams p = toy_params(1);
  p.rho = 1.5;
  CHECK_THROWS_AS(solve(kCorner, Eigen::Vector2d(0, 0), p), std::invalid_argument);

  p = toy_params(1);
  p.d0 = Eigen::ArrayXd::Constant(3, 0.1);  // wrong dimension
  CHECK_THROWS_AS(solve(kCorner, Eigen::Vector2d(0, 0), p), std::invalid_argument);

  p = toy_params(1);
  p.e_g = 0.0;
  CHECK_THROWS_AS(solve(kCorner, Eigen::Vector2d(0, 0), p), std::invalid_argument);
}
