// Reduced polar-coordinate dynamics for two symmetric families of the planar
// n-body problem (G = 1):
//   n = 4: two diametral pairs, masses (1, 1, m2, m2)
//   n = 6: two equilateral triangles, masses (1, 1, 1, m2, m2, m2)
// Both families reduce to four scalar functions r1, r2, theta, beta.
// Also provides the full Cartesian right-hand side used as an independent
// oracle, the ansatz embedding, and the conserved quantities.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace pporb {

using Vec2 = Eigen::Vector2d;
using Vec8 = Eigen::Matrix<double, 8, 1>;

// Radii and mutual distances below this are treated as a collision:
// the right-hand side reports a domain failure instead of evaluating.
inline constexpr double kCollisionFloor = 1e-9;

// The eight reduced coordinates. Angles are never wrapped; theta and beta
// accumulate so that return residuals can use theta(T) directly.
struct ReducedState {
  double r1 = 1.0;
  double r2 = 1.0;
  double theta = 0.0;
  double beta = 0.0;
  double dr1 = 0.0;
  double dr2 = 0.0;
  double dtheta = 0.0;
  double dbeta = 0.0;

  double delta() const { return theta - beta; }

  // Vector layout: (r1, r2, theta, beta, dr1, dr2, dtheta, dbeta).
  Vec8 to_vec() const;
  static ReducedState from_vec(const Vec8& y);
};

// Mass of each body in the second group; first-group bodies have mass 1.
struct MassParam {
  double m2 = 1.0;
};

// Time derivative of a ReducedState.
struct ReducedDeriv {
  double dr1, dr2, dtheta, dbeta;
  double ddr1, ddr2, ddtheta, ddbeta;
};

struct ConservedQuantities {
  double L;  // total angular momentum (z component)
  double E;  // total energy
  double K;  // kinetic energy
};

// Full planar configuration of all n bodies.
struct CartesianState {
  std::vector<double> masses;
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;

  int n() const { return static_cast<int>(masses.size()); }
};

struct Distances4 {
  double d1, d2;
};
struct Distances6 {
  double d1, d2, d3;
};

// Components of the inter-group force for n = 6, expressed in the radial /
// tangential frames of body 1 (A1, B1) and body 4 (A2, B2).
struct ForceTerms6 {
  double A1, B1, A2, B2;
};

// Mutual distances between the groups as closed forms in (r1, r2, delta).
// Zero at an exact collision; no policing here.
Distances4 distances4(double r1, double r2, double delta);
Distances6 distances6(double r1, double r2, double delta);

// Inter-group force components for n = 6. Empty iff some d_i vanishes.
std::optional<ForceTerms6> force_terms6(double r1, double r2, double delta,
                                        const Distances6& d);

// Reduced equations of motion. The Vec8 forms are the integrator-facing hot
// path; they return false when r1, r2 or a mutual distance drops below
// `floor`. The typed forms are convenience wrappers.
bool rhs4(const Vec8& y, double m2, double floor, Vec8& dy);
bool rhs6(const Vec8& y, double m2, double floor, Vec8& dy);
std::optional<ReducedDeriv> rhs4(const ReducedState& s, MassParam m,
                                 double floor = kCollisionFloor);
std::optional<ReducedDeriv> rhs6(const ReducedState& s, MassParam m,
                                 double floor = kCollisionFloor);

// Functor adapters for the generic integrator.
struct Rhs4 {
  double m2;
  double floor = kCollisionFloor;
  bool operator()(const Vec8& y, Vec8& dy) const { return rhs4(y, m2, floor, dy); }
};
struct Rhs6 {
  double m2;
  double floor = kCollisionFloor;
  bool operator()(const Vec8& y, Vec8& dy) const { return rhs6(y, m2, floor, dy); }
};

// Reduced right-hand side selected by body count (n must be 4 or 6).
struct ReducedRhs {
  int n;
  double m2;
  double floor = kCollisionFloor;
  bool operator()(const Vec8& y, Vec8& dy) const {
    return n == 4 ? rhs4(y, m2, floor, dy) : rhs6(y, m2, floor, dy);
  }
};

// Evaluate the ansatz and its time derivative: positions and velocities of
// all n bodies (n = 4 or 6).
CartesianState embed_cartesian(const ReducedState& s, MassParam m, int n);

// Newtonian pairwise gravitation, the independent oracle. Returns the
// derivative state (velocities in the position slots, accelerations in the
// velocity slots); empty if any pair distance is below `floor`.
std::optional<CartesianState> cartesian_rhs(const CartesianState& c,
                                            double floor = kCollisionFloor);

// Flat packing [p1 .. pn, v1 .. vn] for integrating Cartesian states.
Eigen::VectorXd pack(const CartesianState& c);
CartesianState unpack(const std::vector<double>& masses, const Eigen::VectorXd& y);

struct CartesianRhs {
  std::vector<double> masses;
  double floor = kCollisionFloor;
  bool operator()(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const;
};

// Angular momentum, energy and kinetic energy of a reduced state.
// For n = 6 these are the closed triangle-pair forms; the n = 4 analogs are
// the pair-distance forms validated against the Cartesian oracle.
ConservedQuantities conserved(const ReducedState& s, MassParam m, int n);

// Same quantities from a full Cartesian state (standard definitions).
ConservedQuantities conserved_cartesian(const CartesianState& c);

}  // namespace pporb
