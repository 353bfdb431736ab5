#include "pporb/shooting.hpp"

#include <cmath>
#include <limits>

#include "doctest.h"
#include "test_util.hpp"

using namespace pporb;

namespace {
const IntegratorConfig kCfg{};
}

TEST_CASE("table rows reproduce the published residual magnitude") {
  const ReturnSpec spec4{4, M_PI / 3};
  const Residual r4 = residual(testutil::table1_60deg(), spec4, kCfg);
  REQUIRE(r4.evaluable);
  CHECK(r4.error() < 1e-6);

  const ReturnSpec spec6{6, M_PI / 2};
  const Residual r6 = residual(testutil::table2_90deg(), spec6, kCfg);
  REQUIRE(r6.evaluable);
  CHECK(r6.error() < 1e-6);
}

TEST_CASE("zero-angular-momentum start is outside the domain") {
  const Unknowns Z{1.0, 1.0, 0.0, 0.0, 1.0, 10.0};
  const Residual r = residual(Z, ReturnSpec{4, M_PI}, kCfg);
  CHECK(!r.evaluable);
  CHECK(std::isinf(err(Z, ReturnSpec{4, M_PI}, kCfg)));
}

TEST_CASE("Err is the sup norm of the residual vector") {
  Residual r;
  r.evaluable = true;
  r.h << 0.3, -0.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  CHECK(r.error() == 0.7);

  r.evaluable = false;
  CHECK(std::isinf(r.error()));
}

TEST_CASE("inadmissible unknowns evaluate to +infinity") {
  const ReturnSpec spec{4, M_PI};
  Unknowns Z = testutil::table1_60deg();
  for (double* field : {&Z.x1, &Z.x2, &Z.m2, &Z.T}) {
    const double saved = *field;
    *field = -0.5;
    CHECK(std::isinf(err(Z, spec, kCfg)));
    *field = 0.0;
    CHECK(std::isinf(err(Z, spec, kCfg)));
    *field = saved;
  }
  Z.x3 = std::numeric_limits<double>::quiet_NaN();
  CHECK(std::isinf(err(Z, spec, kCfg)));
}

TEST_CASE("residual components sit in the published order") {
  // For a very short horizon every component is predictable to first order.
  Unknowns Z = testutil::table1_60deg();
  Z.T = 1e-5;
  const ReturnSpec spec{4, M_PI / 3};
  const Residual r = residual(Z, spec, kCfg);
  REQUIRE(r.evaluable);

  const auto d0 = rhs4(Z.initial_state(), MassParam{Z.m2});
  REQUIRE(d0.has_value());
  // radial positions move only at second order (dr(0) = 0)
  CHECK(std::abs(r.h[0]) < 1e-8);
  CHECK(std::abs(r.h[1]) < 1e-8);
  // radial velocities grow like ddr(0) * T
  CHECK(r.h[2] == doctest::Approx(d0->ddr1 * Z.T).epsilon(1e-4));
  CHECK(r.h[3] == doctest::Approx(d0->ddr2 * Z.T).epsilon(1e-4));
  // angular rates grow like ddw(0) * T
  CHECK(r.h[4] == doctest::Approx(d0->ddtheta * Z.T).epsilon(1e-4));
  CHECK(r.h[5] == doctest::Approx(d0->ddbeta * Z.T).epsilon(1e-4));
  // angle combinations against their pinned constants
  CHECK(r.h[6] == doctest::Approx((Z.x3 - Z.x4) * Z.T - M_PI).epsilon(1e-9));
  CHECK(r.h[7] == doctest::Approx(Z.x3 * Z.T - M_PI / 3).epsilon(1e-9));
}

TEST_CASE("residual is a deterministic function of its inputs") {
  const Unknowns Z = testutil::table2_90deg();
  const ReturnSpec spec{6, M_PI / 2};
  const Residual a = residual(Z, spec, kCfg);
  const Residual b = residual(Z, spec, kCfg);
  REQUIRE(a.evaluable);
  CHECK(a.h == b.h);  // bitwise
}

TEST_CASE("no chaotic blow-up under 1e-8 coordinate nudges") {
  const struct {
    Unknowns Z;
    ReturnSpec spec;
  } cases[] = {{testutil::table1_60deg(), {4, M_PI / 3}},
               {testutil::table2_90deg(), {6, M_PI / 2}}};
  for (const auto& c : cases) {
    const double base = err(c.Z, c.spec, kCfg);
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd z = c.Z.to_vec();
      z[i] += 1e-8;
      const double moved = err(Unknowns::from_vec(z), c.spec, kCfg);
      CHECK(std::abs(moved - base) <= 1e-3);
    }
  }
}

TEST_CASE("theta1 range advisory") {
  CHECK(ReturnSpec{4, M_PI}.theta1_in_conjectured_range());
  CHECK(ReturnSpec{4, 2 * M_PI}.theta1_in_conjectured_range());
  CHECK(!ReturnSpec{4, 0.1}.theta1_in_conjectured_range());
  CHECK(ReturnSpec{6, M_PI}.theta1_in_conjectured_range());
  CHECK(!ReturnSpec{6, 2 * M_PI}.theta1_in_conjectured_range());
}

TEST_CASE("periodicity: an exact return matches under the 3<->4 swap") {
  // If h(Z) = 0 exactly, the state at T is the initial one rotated by theta1
  // with the second pair exchanged; mismatch must vanish to rounding.
  const Unknowns Z = testutil::table1_60deg();
  const double theta1 = M_PI / 3;
  const ReducedState s0 = Z.initial_state();
  const ReducedState exact{Z.x1, Z.x2, theta1, theta1 - M_PI,
                           0.0,  0.0,  Z.x3,   Z.x4};
  const auto rep = match_after_rotation(s0, exact, MassParam{Z.m2}, 4, 1e-12);
  REQUIRE(rep.evaluable);
  CHECK(rep.max_mismatch < 1e-13);
  CHECK(rep.permutation == std::vector<int>{0, 1, 3, 2});

  // same algebra for n = 6: beta(T) = theta1 - 2pi/3, relabeling a 3-cycle
  const Unknowns W = testutil::table2_90deg();
  const double t1 = M_PI / 2;
  const ReducedState w0 = W.initial_state();
  const ReducedState wT{W.x1, W.x2, t1, t1 - 2 * M_PI / 3, 0.0, 0.0, W.x3, W.x4};
  const auto rep6 = match_after_rotation(w0, wT, MassParam{W.m2}, 6, 1e-12);
  CHECK(rep6.max_mismatch < 1e-13);
  CHECK(rep6.permutation == std::vector<int>{0, 1, 2, 4, 5, 3});
}

TEST_CASE("periodicity holds on the golden rows") {
  const auto rep4 =
      periodicity_check(testutil::table1_60deg(), ReturnSpec{4, M_PI / 3}, kCfg, 1e-5);
  REQUIRE(rep4.evaluable);
  CHECK(rep4.max_mismatch < 1e-5);
  CHECK(rep4.within_tol);
  CHECK(rep4.permutation == std::vector<int>{0, 1, 3, 2});

  const auto rep6 =
      periodicity_check(testutil::table2_90deg(), ReturnSpec{6, M_PI / 2}, kCfg, 1e-5);
  REQUIRE(rep6.evaluable);
  CHECK(rep6.max_mismatch < 1e-5);
  // relabeling stays inside the groups; for n=6 the observed minimizer is the
  // 3-cycle on the light triangle
  CHECK(rep6.permutation[0] == 0);
  CHECK(rep6.permutation[1] == 1);
  CHECK(rep6.permutation[2] == 2);
  CHECK(rep6.permutation == std::vector<int>{0, 1, 2, 4, 5, 3});

  const auto failed = periodicity_check(Unknowns{1, 1, 0, 0, 1, 10},
                                        ReturnSpec{4, M_PI}, kCfg, 1e-5);
  CHECK(!failed.evaluable);
}
