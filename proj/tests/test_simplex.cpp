#include <catch2/catch_amalgamated.hpp>

#include "lipfree/simplex.hpp"

using namespace lipfree;

namespace {
LpSolution solve_both_rules(const LpProblem& lp) {
  LpSolution a = solve_lp(lp, PivotRule::Bland);
  LpSolution b = solve_lp(lp, PivotRule::Dantzig);
  REQUIRE(a.status == b.status);
  if (a.status == LpStatus::Optimal) REQUIRE(a.objective == b.objective);
  return a;
}
}  // namespace

TEST_CASE("simplex solves a small production problem") {
  // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 (classic; optimum 36)
  LpProblem lp;
  lp.c = {Rat(3), Rat(5), Rat(0), Rat(0), Rat(0)};
  lp.A = {{Rat(1), Rat(0), Rat(1), Rat(0), Rat(0)},
          {Rat(0), Rat(2), Rat(0), Rat(1), Rat(0)},
          {Rat(3), Rat(2), Rat(0), Rat(0), Rat(1)}};
  lp.b = {Rat(4), Rat(12), Rat(18)};
  auto sol = solve_both_rules(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == 36);
  CHECK(sol.x[0] == 2);
  CHECK(sol.x[1] == 6);
}

TEST_CASE("simplex detects infeasibility") {
  // x = 1 and x = 2 simultaneously
  LpProblem lp;
  lp.c = {Rat(1)};
  lp.A = {{Rat(1)}, {Rat(1)}};
  lp.b = {Rat(1), Rat(2)};
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("simplex detects unboundedness") {
  // max x st x - y = 0 (both can grow)
  LpProblem lp;
  lp.c = {Rat(1), Rat(0)};
  lp.A = {{Rat(1), Rat(-1)}};
  lp.b = {Rat(0)};
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("simplex tolerates redundant rows and negative b") {
  LpProblem lp;
  // max x + y st x + y <= 2 (written as equality with slack), duplicated row,
  // and a negated copy.
  lp.c = {Rat(1), Rat(1), Rat(0)};
  lp.A = {{Rat(1), Rat(1), Rat(1)},
          {Rat(1), Rat(1), Rat(1)},
          {Rat(-1), Rat(-1), Rat(-1)}};
  lp.b = {Rat(2), Rat(2), Rat(-2)};
  auto sol = solve_both_rules(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == 2);
}

TEST_CASE("simplex handles a degenerate vertex") {
  // max x + 2y with constraints meeting at (0,1) redundantly
  LpProblem lp;
  lp.c = {Rat(1), Rat(2), Rat(0), Rat(0), Rat(0)};
  lp.A = {{Rat(1), Rat(1), Rat(1), Rat(0), Rat(0)},
          {Rat(0), Rat(1), Rat(0), Rat(1), Rat(0)},
          {Rat(1), Rat(2), Rat(0), Rat(0), Rat(1)}};
  lp.b = {Rat(1), Rat(1), Rat(2)};
  auto sol = solve_both_rules(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == 2);
}

TEST_CASE("solution satisfies the constraints exactly") {
  LpProblem lp;
  lp.c = {Rat(2, 3), Rat(-1, 5), Rat(1)};
  lp.A = {{Rat(1, 2), Rat(1), Rat(0)}, {Rat(0), Rat(1, 3), Rat(1)}};
  lp.b = {Rat(7, 4), Rat(5, 6)};
  auto sol = solve_both_rules(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  for (std::size_t i = 0; i < lp.A.size(); ++i) {
    Rat lhs = 0;
    for (std::size_t j = 0; j < lp.c.size(); ++j) lhs += lp.A[i][j] * sol.x[j];
    CHECK(lhs == lp.b[i]);
  }
  for (const Rat& x : sol.x) CHECK(x >= 0);
}
