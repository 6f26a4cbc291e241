#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvxsched/lp.hpp"
#include "cvxsched/rng.hpp"
#include "support/lp_enum.hpp"
#include "support/random_lp.hpp"

#include <cstring>

using namespace cvxsched;

namespace {

LpInstance single_var(double c, double bound, double upper) {
  LpInstance lp;
  lp.set_sizes(1, upper);
  lp.objective[0] = c;
  lp.add_row({{0, 1.0}}, bound);
  return lp;
}

}  // namespace

TEST_CASE("binding row dual equals objective rate") {
  // max 2x s.t. x <= 0.5, x in [0,1]
  const LpInstance lp = single_var(2.0, 0.5, 1.0);
  const LpSolution sol = lp_solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.5));
  CHECK(sol.y[0] == doctest::Approx(2.0));
  CHECK(sol.primal_objective == doctest::Approx(1.0));
  CHECK(lp_certificate(lp, sol).worst() <= 1e-6);
}

TEST_CASE("slack row has zero dual") {
  // max x s.t. x <= 5, x in [0,1]
  const LpInstance lp = single_var(1.0, 5.0, 1.0);
  const LpSolution sol = lp_solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.y[0] == doctest::Approx(0.0));
}

TEST_CASE("three-variable capacity LP matches vertex enumeration") {
  // max 3x1 + x2 + x3 s.t. 2x1 + 2x2 + 2x3 <= 4, x in [0,1]^3
  LpInstance lp;
  lp.set_sizes(3, 1.0);
  lp.objective << 3.0, 1.0, 1.0;
  lp.add_row({{0, 2.0}, {1, 2.0}, {2, 2.0}}, 4.0);

  const auto oracle = testsupport::lp_enumerate(lp);
  REQUIRE(oracle.feasible_point_found);
  CHECK(oracle.objective == doctest::Approx(4.0));  // frozen from enumeration

  const LpSolution sol = lp_solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.primal_objective == doctest::Approx(oracle.objective));
  // the capacity dual is unique here: an interior split forces 1 - 2y = 0
  CHECK(sol.y[0] == doctest::Approx(0.5));
  CHECK(lp_certificate(lp, sol).worst() <= 1e-6);
}

TEST_CASE("infeasible and unbounded statuses") {
  SUBCASE("negative bound on a nonnegative variable") {
    const LpInstance lp = single_var(1.0, -1.0, 1.0);
    CHECK(lp_solve(lp).status == LpStatus::Infeasible);
  }
  SUBCASE("no rows, infinite upper bound") {
    LpInstance lp;
    lp.set_sizes(1, kInf);
    lp.objective[0] = 1.0;
    CHECK(lp_solve(lp).status == LpStatus::Unbounded);
  }
  SUBCASE("non-binding row, infinite upper bound") {
    LpInstance lp;
    lp.set_sizes(1, kInf);
    lp.objective[0] = 1.0;
    lp.add_row({{0, -1.0}}, 1.0);
    CHECK(lp_solve(lp).status == LpStatus::Unbounded);
  }
  SUBCASE("iteration limit reported") {
    LpInstance lp;
    lp.set_sizes(3, 1.0);
    lp.objective << 1.0, 1.0, 1.0;
    lp.add_row({{0, 1.0}, {1, 1.0}, {2, 1.0}}, 2.0);
    CHECK(lp_solve(lp, 1e-6, 1).status == LpStatus::IterationLimit);
  }
}

TEST_CASE("certificates hold on randomized instances") {
  Rng rng(7001);
  int optimal = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(8));
    const int m = 1 + static_cast<int>(rng.bounded(10));
    const LpInstance lp = testsupport::random_lp(rng, n, m);
    const LpSolution sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);  // feasible+bounded by build
    ++optimal;
    const LpCertificate cert = lp_certificate(lp, sol);
    CAPTURE(trial);
    CHECK(cert.primal_infeasibility <= 1e-6);
    CHECK(cert.dual_infeasibility <= 1e-6);
    CHECK(cert.duality_gap <= 1e-6);
    CHECK(cert.complementary_slackness <= 1e-6);

    if (n <= 3 && m <= 6) {
      const auto oracle = testsupport::lp_enumerate(lp);
      REQUIRE(oracle.feasible_point_found);
      CHECK(sol.primal_objective ==
            doctest::Approx(oracle.objective).epsilon(1e-6));
    }
  }
  CHECK(optimal == 60);
}

TEST_CASE("solves are bitwise deterministic") {
  Rng rng(99);
  const LpInstance lp = testsupport::random_lp(rng, 6, 8);
  const LpSolution a = lp_solve(lp);
  const LpSolution b = lp_solve(lp);
  REQUIRE(a.x.size() == b.x.size());
  CHECK(std::memcmp(a.x.data(), b.x.data(), sizeof(double) * a.x.size()) == 0);
  CHECK(std::memcmp(a.y.data(), b.y.data(), sizeof(double) * a.y.size()) == 0);
  CHECK(a.primal_objective == b.primal_objective);
  CHECK(a.dual_objective == b.dual_objective);
}

TEST_CASE("partitioned and dense paths agree on structured instances") {
  // Same feasible set encoded twice: with exact unit choice rows (eligible
  // for the partitioned engine) and with one row scaled by 2 (dense path).
  Rng rng(4242);
  for (int trial = 0; trial < 10; ++trial) {
    const int tasks = 20 + static_cast<int>(rng.bounded(10));
    const int shapes = 3;
    LpInstance unit;
    unit.set_sizes(tasks * shapes, 1.0);
    std::vector<double> cap(2, 0.0);
    cap[0] = rng.uniform(5.0, 15.0);
    cap[1] = rng.uniform(5.0, 15.0);
    std::vector<std::vector<std::pair<int, double>>> cap_rows(2 * shapes);
    for (int t = 0; t < tasks; ++t) {
      std::vector<std::pair<int, double>> row;
      for (int s = 0; s < shapes; ++s) {
        const int var = t * shapes + s;
        unit.objective[var] = rng.uniform(0.5, 8.0);
        row.emplace_back(var, 1.0);
        cap_rows[2 * s].emplace_back(var, rng.uniform(0.1, 2.0));
        cap_rows[2 * s + 1].emplace_back(var, rng.uniform(0.1, 2.0));
      }
      unit.add_row(std::move(row), 1.0);
    }
    for (int s = 0; s < shapes; ++s) {
      unit.add_row(cap_rows[2 * s], cap[0]);
      unit.add_row(cap_rows[2 * s + 1], cap[1]);
    }

    LpInstance scaled = unit;
    for (auto& [j, v] : scaled.rows[0]) v *= 2.0;  // breaks unit detection
    scaled.rhs[0] *= 2.0;

    const LpSolution su = lp_solve(unit);
    const LpSolution sd = lp_solve(scaled);
    REQUIRE(su.status == LpStatus::Optimal);
    REQUIRE(sd.status == LpStatus::Optimal);
    CAPTURE(trial);
    CHECK(su.primal_objective ==
          doctest::Approx(sd.primal_objective).epsilon(1e-6));
    CHECK(lp_certificate(unit, su).worst() <= 1e-6);
    CHECK(lp_certificate(scaled, sd).worst() <= 1e-6);
  }
}

TEST_CASE("degenerate edge cases") {
  SUBCASE("zero variables, feasible rows") {
    LpInstance lp;
    lp.set_sizes(0);
    lp.add_row({}, 1.0);
    CHECK(lp_solve(lp).status == LpStatus::Optimal);
  }
  SUBCASE("zero variables, violated empty row") {
    LpInstance lp;
    lp.set_sizes(0);
    lp.add_row({}, -2.0);
    CHECK(lp_solve(lp).status == LpStatus::Infeasible);
  }
  SUBCASE("empty row with negative bound among variables") {
    LpInstance lp;
    lp.set_sizes(1, 1.0);
    lp.objective[0] = 1.0;
    lp.add_row({}, -2.0);
    CHECK(lp_solve(lp).status == LpStatus::Infeasible);
  }
}
