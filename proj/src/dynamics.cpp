#include "pporb/dynamics.hpp"

#include <cassert>
#include <cmath>

namespace pporb {

Vec8 ReducedState::to_vec() const {
  Vec8 y;
  y << r1, r2, theta, beta, dr1, dr2, dtheta, dbeta;
  return y;
}

ReducedState ReducedState::from_vec(const Vec8& y) {
  return {y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]};
}

Distances4 distances4(double r1, double r2, double delta) {
  const double s = std::sin(delta);
  const double q = r1 * r1 + r2 * r2;
  const double c = 2.0 * r1 * r2 * s;
  return {std::sqrt(std::max(0.0, q - c)), std::sqrt(std::max(0.0, q + c))};
}

Distances6 distances6(double r1, double r2, double delta) {
  constexpr double kSixth = M_PI / 6.0;
  const double q = r1 * r1 + r2 * r2;
  const double d1 = q - 2.0 * r1 * r2 * std::sin(kSixth + delta);
  const double d2 = q + 2.0 * r1 * r2 * std::cos(delta);
  const double d3 = q - 2.0 * r1 * r2 * std::sin(kSixth - delta);
  return {std::sqrt(std::max(0.0, d1)), std::sqrt(std::max(0.0, d2)),
          std::sqrt(std::max(0.0, d3))};
}

std::optional<ForceTerms6> force_terms6(double r1, double r2, double delta,
                                        const Distances6& d) {
  if (d.d1 <= 0.0 || d.d2 <= 0.0 || d.d3 <= 0.0) return std::nullopt;
  constexpr double kSixth = M_PI / 6.0;
  const double sp = std::sin(kSixth + delta), cp = std::cos(kSixth + delta);
  const double sm = std::sin(kSixth - delta), cm = std::cos(kSixth - delta);
  const double sd = std::sin(delta), cd = std::cos(delta);
  const double i1 = 1.0 / (d.d1 * d.d1 * d.d1);
  const double i2 = 1.0 / (d.d2 * d.d2 * d.d2);
  const double i3 = 1.0 / (d.d3 * d.d3 * d.d3);

  ForceTerms6 f;
  f.A1 = (-r1 + r2 * sp) * i1 + (-r1 - r2 * cd) * i2 + (-r1 + r2 * sm) * i3;
  f.B1 = r2 * cp * i1 + r2 * sd * i2 - r2 * cm * i3;
  f.A2 = (r1 * sp - r2) * i1 + (r1 * sm - r2) * i3 + (-r1 * cd - r2) * i2;
  f.B2 = -r1 * cp * i1 + r1 * cm * i3 - r1 * sd * i2;
  return f;
}

// y = (r1, r2, theta, beta, dr1, dr2, dtheta, dbeta)
bool rhs4(const Vec8& y, double m2, double floor, Vec8& dy) {
  const double r1 = y[0], r2 = y[1];
  if (!(r1 > floor && r2 > floor)) return false;
  const double delta = y[2] - y[3];
  const double dr1 = y[4], dr2 = y[5], dth = y[6], dbe = y[7];

  const double sd = std::sin(delta), cd = std::cos(delta);
  const double q = r1 * r1 + r2 * r2;
  const double cross = 2.0 * r1 * r2 * sd;
  const double d1sq = q - cross, d2sq = q + cross;
  if (!(d1sq > floor * floor && d2sq > floor * floor)) return false;
  const double d1 = std::sqrt(d1sq), d2 = std::sqrt(d2sq);
  const double i1 = 1.0 / (d1sq * d1), i2 = 1.0 / (d2sq * d2);

  dy[0] = dr1;
  dy[1] = dr2;
  dy[2] = dth;
  dy[3] = dbe;
  dy[4] = r1 * dth * dth - 1.0 / (4.0 * r1 * r1) +
          m2 * ((r2 * sd - r1) * i1 + (-r2 * sd - r1) * i2);
  dy[5] = r2 * dbe * dbe - m2 / (4.0 * r2 * r2) +
          ((r1 * sd - r2) * i1 + (-r1 * sd - r2) * i2);
  dy[6] = (m2 * r2 * cd * (i1 - i2) - 2.0 * dr1 * dth) / r1;
  dy[7] = (r1 * cd * (i2 - i1) - 2.0 * dr2 * dbe) / r2;
  return true;
}

bool rhs6(const Vec8& y, double m2, double floor, Vec8& dy) {
  const double r1 = y[0], r2 = y[1];
  if (!(r1 > floor && r2 > floor)) return false;
  const double delta = y[2] - y[3];
  const double dr1 = y[4], dr2 = y[5], dth = y[6], dbe = y[7];

  const Distances6 d = distances6(r1, r2, delta);
  if (!(d.d1 > floor && d.d2 > floor && d.d3 > floor)) return false;
  const auto f = force_terms6(r1, r2, delta, d);

  constexpr double kInvSqrt3 = 0.57735026918962576451;  // 1/sqrt(3)
  dy[0] = dr1;
  dy[1] = dr2;
  dy[2] = dth;
  dy[3] = dbe;
  dy[4] = r1 * dth * dth - kInvSqrt3 / (r1 * r1) + m2 * f->A1;
  dy[5] = r2 * dbe * dbe + f->A2 - m2 * kInvSqrt3 / (r2 * r2);
  dy[6] = (m2 * f->B1 - 2.0 * dr1 * dth) / r1;
  dy[7] = (f->B2 - 2.0 * dr2 * dbe) / r2;
  return true;
}

std::optional<ReducedDeriv> rhs4(const ReducedState& s, MassParam m, double floor) {
  Vec8 dy;
  if (!rhs4(s.to_vec(), m.m2, floor, dy)) return std::nullopt;
  return ReducedDeriv{dy[0], dy[1], dy[2], dy[3], dy[4], dy[5], dy[6], dy[7]};
}

std::optional<ReducedDeriv> rhs6(const ReducedState& s, MassParam m, double floor) {
  Vec8 dy;
  if (!rhs6(s.to_vec(), m.m2, floor, dy)) return std::nullopt;
  return ReducedDeriv{dy[0], dy[1], dy[2], dy[3], dy[4], dy[5], dy[6], dy[7]};
}

CartesianState embed_cartesian(const ReducedState& s, MassParam m, int n) {
  assert(n == 4 || n == 6);
  const int half = n / 2;
  const double spacing = 2.0 * M_PI / half;           // pi or 2*pi/3
  const double phase = (n == 4) ? M_PI / 2 : M_PI / 3;  // second-group offset

  CartesianState c;
  c.masses.reserve(n);
  c.positions.reserve(n);
  c.velocities.reserve(n);
  for (int i = 0; i < half; ++i) {
    const double phi = s.theta + i * spacing;
    const double cp = std::cos(phi), sp = std::sin(phi);
    c.masses.push_back(1.0);
    c.positions.emplace_back(s.r1 * cp, s.r1 * sp);
    c.velocities.emplace_back(s.dr1 * cp - s.r1 * s.dtheta * sp,
                              s.dr1 * sp + s.r1 * s.dtheta * cp);
  }
  for (int i = 0; i < half; ++i) {
    const double phi = s.beta + phase + i * spacing;
    const double cp = std::cos(phi), sp = std::sin(phi);
    c.masses.push_back(m.m2);
    c.positions.emplace_back(s.r2 * cp, s.r2 * sp);
    c.velocities.emplace_back(s.dr2 * cp - s.r2 * s.dbeta * sp,
                              s.dr2 * sp + s.r2 * s.dbeta * cp);
  }
  return c;
}

std::optional<CartesianState> cartesian_rhs(const CartesianState& c, double floor) {
  const int n = c.n();
  CartesianState d;
  d.masses = c.masses;
  d.positions = c.velocities;
  d.velocities.assign(n, Vec2::Zero());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec2 rij = c.positions[j] - c.positions[i];
      const double dist = rij.norm();
      if (dist < floor) return std::nullopt;
      const Vec2 over_d3 = rij / (dist * dist * dist);
      d.velocities[i] += c.masses[j] * over_d3;
      d.velocities[j] -= c.masses[i] * over_d3;
    }
  }
  return d;
}

Eigen::VectorXd pack(const CartesianState& c) {
  const int n = c.n();
  Eigen::VectorXd y(4 * n);
  for (int i = 0; i < n; ++i) {
    y.segment<2>(2 * i) = c.positions[i];
    y.segment<2>(2 * n + 2 * i) = c.velocities[i];
  }
  return y;
}

CartesianState unpack(const std::vector<double>& masses, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(masses.size());
  assert(y.size() == 4 * n);
  CartesianState c;
  c.masses = masses;
  c.positions.reserve(n);
  c.velocities.reserve(n);
  for (int i = 0; i < n; ++i) {
    c.positions.emplace_back(y.segment<2>(2 * i));
    c.velocities.emplace_back(y.segment<2>(2 * n + 2 * i));
  }
  return c;
}

bool CartesianRhs::operator()(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
  const int n = static_cast<int>(masses.size());
  dy.resize(4 * n);
  dy.head(2 * n) = y.tail(2 * n);
  dy.tail(2 * n).setZero();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec2 rij = y.segment<2>(2 * j) - y.segment<2>(2 * i);
      const double dist = rij.norm();
      if (dist < floor) return false;
      const Vec2 over_d3 = rij / (dist * dist * dist);
      dy.segment<2>(2 * n + 2 * i) += masses[j] * over_d3;
      dy.segment<2>(2 * n + 2 * j) -= masses[i] * over_d3;
    }
  }
  return true;
}

ConservedQuantities conserved(const ReducedState& s, MassParam m, int n) {
  assert(n == 4 || n == 6);
  const double m2 = m.m2;
  ConservedQuantities q;
  if (n == 4) {
    const Distances4 d = distances4(s.r1, s.r2, s.delta());
    q.L = 2.0 * s.r1 * s.r1 * s.dtheta + 2.0 * m2 * s.r2 * s.r2 * s.dbeta;
    q.K = (s.dr1 * s.dr1 + s.r1 * s.r1 * s.dtheta * s.dtheta) +
          m2 * (s.dr2 * s.dr2 + s.r2 * s.r2 * s.dbeta * s.dbeta);
    const double pot = 1.0 / (2.0 * s.r1) + m2 * m2 / (2.0 * s.r2) +
                       2.0 * m2 * (1.0 / d.d1 + 1.0 / d.d2);
    q.E = q.K - pot;
  } else {
    const Distances6 d = distances6(s.r1, s.r2, s.delta());
    const double sqrt3 = std::sqrt(3.0);
    q.L = 3.0 * s.r1 * s.r1 * s.dtheta + 3.0 * m2 * s.r2 * s.r2 * s.dbeta;
    q.K = 1.5 * (s.dr1 * s.dr1 + s.r1 * s.r1 * s.dtheta * s.dtheta) +
          1.5 * m2 * (s.dr2 * s.dr2 + s.r2 * s.r2 * s.dbeta * s.dbeta);
    const double pot = sqrt3 / s.r1 + sqrt3 * m2 * m2 / s.r2 +
                       3.0 * m2 * (1.0 / d.d1 + 1.0 / d.d2 + 1.0 / d.d3);
    q.E = q.K - pot;
  }
  return q;
}

ConservedQuantities conserved_cartesian(const CartesianState& c) {
  const int n = c.n();
  ConservedQuantities q{0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const Vec2& p = c.positions[i];
    const Vec2& v = c.velocities[i];
    q.L += c.masses[i] * (p.x() * v.y() - p.y() * v.x());
    q.K += 0.5 * c.masses[i] * v.squaredNorm();
  }
  double pot = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pot += c.masses[i] * c.masses[j] / (c.positions[j] - c.positions[i]).norm();
  q.E = q.K - pot;
  return q;
}

}  // namespace pporb
