// Deterministic explicit Runge-Kutta integration over [0, T] for autonomous
// systems. Two methods: classic fixed-step RK4 and an embedded Dormand-Prince
// 5(4) pair with step-size control. States are Eigen vectors (fixed-size or
// dynamic); the right-hand side is a callable
//     bool rhs(const State& y, State& dy)
// returning false when y left the admissible domain (collision floor).
// The final step is always shortened to land exactly on T, so there is no
// interpolation error at the endpoint.
#pragma once

#include "pporb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace pporb {

enum class IntegratorMethod { rk4_fixed, rk54_adaptive };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::rk54_adaptive;
  double step = 1e-3;  // fixed step size; initial trial step when adaptive
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  long max_steps = 10'000'000;  // budget on attempted steps
  double collision_floor = kCollisionFloor;
};

enum class FailureReason { collision, non_finite, step_budget };

struct IntegrationFailure {
  FailureReason reason;
  double time;
};

template <class State>
struct IntegrationOutcome {
  std::optional<State> final_state;           // present iff completed
  std::optional<IntegrationFailure> failure;  // present iff failed
  long steps_taken = 0;                       // accepted steps

  bool completed() const { return final_state.has_value(); }
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
};

template <class State>
struct TrajectoryOutcome {
  Trajectory<State> trajectory;  // samples up to the failure point
  std::optional<IntegrationFailure> failure;

  bool completed() const { return !failure.has_value(); }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th-order and embedded 4th-order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

inline constexpr double kSafety = 0.9;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 10.0;

template <class State, class Rhs>
IntegrationOutcome<State> integrate_rk4(Rhs&& rhs, const State& y0, double T,
                                        const IntegratorConfig& cfg) {
  IntegrationOutcome<State> out;
  State y = y0, k1 = y0, k2 = y0, k3 = y0, k4 = y0, ytmp = y0;
  double t = 0.0;
  long attempts = 0;
  while (t < T) {
    if (attempts++ >= cfg.max_steps) {
      out.failure = {FailureReason::step_budget, t};
      return out;
    }
    const bool last = (T - t <= cfg.step);
    const double h = last ? T - t : cfg.step;
    if (!rhs(y, k1)) { out.failure = {FailureReason::collision, t}; return out; }
    ytmp = y + (0.5 * h) * k1;
    if (!rhs(ytmp, k2)) { out.failure = {FailureReason::collision, t}; return out; }
    ytmp = y + (0.5 * h) * k2;
    if (!rhs(ytmp, k3)) { out.failure = {FailureReason::collision, t}; return out; }
    ytmp = y + h * k3;
    if (!rhs(ytmp, k4)) { out.failure = {FailureReason::collision, t}; return out; }
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = last ? T : t + h;
    ++out.steps_taken;
    if (!y.allFinite()) {
      out.failure = {FailureReason::non_finite, t};
      return out;
    }
  }
  out.final_state = y;
  return out;
}

template <class State, class Rhs>
IntegrationOutcome<State> integrate_rk54(Rhs&& rhs, const State& y0, double T,
                                         const IntegratorConfig& cfg) {
  IntegrationOutcome<State> out;
  State y = y0;
  State k1 = y0, k2 = y0, k3 = y0, k4 = y0, k5 = y0, k6 = y0, k7 = y0;
  State ytmp = y0, ynew = y0, yerr = y0;

  double t = 0.0;
  double h = std::min(cfg.step, T);
  long attempts = 0;
  bool k1_valid = false;
  // Whether the last step shrink was forced by a domain failure; decides the
  // failure reason once h underflows.
  bool shrunk_by_domain = false;

  while (t < T) {
    if (attempts++ >= cfg.max_steps) {
      out.failure = {FailureReason::step_budget, t};
      return out;
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t)) {
      out.failure = {shrunk_by_domain ? FailureReason::collision
                                      : FailureReason::step_budget,
                     t};
      return out;
    }
    const bool last = (t + h >= T);
    if (last) h = T - t;

    if (!k1_valid) {
      // The incumbent state itself is not evaluable: hard failure.
      if (!rhs(y, k1)) { out.failure = {FailureReason::collision, t}; return out; }
      k1_valid = true;
    }
    // A trial stage leaving the domain only shrinks the step; collision is
    // declared when no reachable step stays inside.
    ytmp = y + h * (a21 * k1);
    if (!rhs(ytmp, k2)) { h *= kMinFactor; shrunk_by_domain = true; continue; }
    ytmp = y + h * (a31 * k1 + a32 * k2);
    if (!rhs(ytmp, k3)) { h *= kMinFactor; shrunk_by_domain = true; continue; }
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    if (!rhs(ytmp, k4)) { h *= kMinFactor; shrunk_by_domain = true; continue; }
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    if (!rhs(ytmp, k5)) { h *= kMinFactor; shrunk_by_domain = true; continue; }
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    if (!rhs(ytmp, k6)) { h *= kMinFactor; shrunk_by_domain = true; continue; }
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    if (!rhs(ynew, k7)) { h *= kMinFactor; shrunk_by_domain = true; continue; }

    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = yerr[i] / sc;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(y.size()));

    if (!std::isfinite(err)) {
      h *= kMinFactor;
      shrunk_by_domain = false;
      continue;
    }
    if (err <= 1.0) {
      t = last ? T : t + h;
      y = ynew;
      k1 = k7;  // FSAL
      shrunk_by_domain = false;
      ++out.steps_taken;
      if (!y.allFinite()) {
        out.failure = {FailureReason::non_finite, t};
        return out;
      }
      const double factor = (err == 0.0)
                                ? kMaxFactor
                                : std::clamp(kSafety * std::pow(err, -0.2),
                                             kMinFactor, kMaxFactor);
      h *= factor;
    } else {
      h *= std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, 1.0);
      shrunk_by_domain = false;
    }
  }
  out.final_state = y;
  return out;
}

}  // namespace detail

// Flow of `rhs` from y0 over [0, T]. Identical inputs give bitwise-identical
// outcomes; failures are reported in the outcome, never thrown.
template <class State, class Rhs>
IntegrationOutcome<State> integrate(Rhs&& rhs, const State& y0, double T,
                                    const IntegratorConfig& cfg) {
  if (T <= 0.0) {
    IntegrationOutcome<State> out;
    out.final_state = y0;
    return out;
  }
  if (cfg.method == IntegratorMethod::rk4_fixed)
    return detail::integrate_rk4(rhs, y0, T, cfg);
  return detail::integrate_rk54(rhs, y0, T, cfg);
}

// k samples at uniform times including both endpoints (k >= 2). Each segment
// restarts the integrator from the previous sample.
template <class State, class Rhs>
TrajectoryOutcome<State> sample_trajectory(Rhs&& rhs, const State& y0, double T,
                                           const IntegratorConfig& cfg, int k) {
  TrajectoryOutcome<State> out;
  out.trajectory.times.push_back(0.0);
  out.trajectory.states.push_back(y0);
  State y = y0;
  double t_prev = 0.0;
  for (int i = 1; i < k; ++i) {
    const double t_i = (i == k - 1) ? T : T * static_cast<double>(i) / (k - 1);
    auto seg = integrate(rhs, y, t_i - t_prev, cfg);
    if (!seg.completed()) {
      out.failure = seg.failure;
      out.failure->time += t_prev;  // segment-local time to absolute
      return out;
    }
    y = *seg.final_state;
    out.trajectory.times.push_back(t_i);
    out.trajectory.states.push_back(y);
    t_prev = t_i;
  }
  return out;
}

struct DriftReport {
  double drift_L = 0.0;  // max over samples of |L(t)-L0| / max(1, |L0|)
  double drift_E = 0.0;
  std::optional<IntegrationFailure> failure;

  bool completed() const { return !failure.has_value(); }
};

// Relative drift of the conserved quantities along the reduced flow,
// measured at `samples` uniform times.
template <class Rhs>
DriftReport conservation_drift(Rhs&& rhs, const ReducedState& s0, MassParam m,
                               int n, double T, const IntegratorConfig& cfg,
                               int samples = 201) {
  DriftReport rep;
  auto traj = sample_trajectory(rhs, s0.to_vec(), T, cfg, samples);
  if (!traj.completed()) {
    rep.failure = traj.failure;
    return rep;
  }
  const ConservedQuantities q0 = conserved(s0, m, n);
  const double scale_L = std::max(1.0, std::abs(q0.L));
  const double scale_E = std::max(1.0, std::abs(q0.E));
  for (const auto& yv : traj.trajectory.states) {
    const ConservedQuantities q = conserved(ReducedState::from_vec(yv), m, n);
    rep.drift_L = std::max(rep.drift_L, std::abs(q.L - q0.L) / scale_L);
    rep.drift_E = std::max(rep.drift_E, std::abs(q.E - q0.E) / scale_E);
  }
  return rep;
}

}  // namespace pporb
