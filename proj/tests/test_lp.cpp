#include <set>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace dip;

namespace {

LinearProgram single_bound() {
  LinearProgram lp(Sense::minimize);
  auto x = lp.add_variable("x", VarSign::free);
  lp.set_objective(x, 1);
  lp.add_constraint("lower", Relation::greater_equal, LinearExpr().add(x, 1), 1);
  return lp;
}

// Beale's example: cycles under the textbook largest-coefficient rule.
LinearProgram beale() {
  LinearProgram lp(Sense::minimize);
  std::size_t x[4];
  const Rational c[4] = {Rational(-3, 4), 150, Rational(-1, 50), 6};
  for (int j = 0; j < 4; ++j) {
    x[j] = lp.add_variable("x" + std::to_string(j), VarSign::nonnegative);
    lp.set_objective(x[j], c[j]);
  }
  LinearExpr r1, r2, r3;
  r1.add(x[0], Rational(1, 4)).add(x[1], -60).add(x[2], Rational(-1, 25)).add(x[3], 9);
  r2.add(x[0], Rational(1, 2)).add(x[1], -90).add(x[2], Rational(-1, 50)).add(x[3], 3);
  r3.add(x[2], 1);
  lp.add_constraint("r1", Relation::less_equal, r1, 0);
  lp.add_constraint("r2", Relation::less_equal, r2, 0);
  lp.add_constraint("r3", Relation::less_equal, r3, 1);
  return lp;
}

}  // namespace

TEST(Simplex, SingleBound) {
  auto lp = single_bound();
  auto sol = solve_exact(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_EQ(sol.objective, 1);
  EXPECT_EQ(sol.value(lp, "x"), 1);
  EXPECT_EQ(sol.dual(lp, "lower"), 1);
}

TEST(Simplex, BindingBudget) {
  LinearProgram lp(Sense::maximize);
  auto x = lp.add_variable("x", VarSign::nonnegative);
  auto y = lp.add_variable("y", VarSign::nonnegative);
  lp.set_objective(x, 1);
  lp.set_objective(y, 1);
  lp.add_constraint("cap", Relation::less_equal, LinearExpr().add(x, 1).add(y, 1), 1);
  auto sol = solve_exact(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_EQ(sol.objective, 1);
  EXPECT_TRUE(check_certificates(lp, sol).ok());
}

TEST(Simplex, InfeasibleAndUnbounded) {
  LinearProgram bad;
  auto x = bad.add_variable("x", VarSign::free);
  bad.add_constraint("hi", Relation::less_equal, LinearExpr().add(x, 1), 0);
  bad.add_constraint("lo", Relation::greater_equal, LinearExpr().add(x, 1), 1);
  EXPECT_EQ(solve_exact(bad).status, Status::infeasible);
  EXPECT_EQ(enumerate_bases_oracle(bad).status, Status::infeasible);

  LinearProgram ray(Sense::maximize);
  auto r = ray.add_variable("r", VarSign::nonnegative);
  ray.set_objective(r, 1);
  ray.add_constraint("floor", Relation::greater_equal, LinearExpr().add(r, 1), 2);
  EXPECT_EQ(solve_exact(ray).status, Status::unbounded);
  EXPECT_EQ(enumerate_bases_oracle(ray).status, Status::unbounded);
}

TEST(Simplex, FourByFourAgainstOracle) {
  // fixed 4-variable, 4-row instance with rational data
  LinearProgram lp(Sense::maximize);
  std::size_t x[4];
  const Rational c[4] = {3, 2, Rational(5, 2), -1};
  for (int j = 0; j < 4; ++j) {
    x[j] = lp.add_variable("x" + std::to_string(j), VarSign::nonnegative);
    lp.set_objective(x[j], c[j]);
  }
  lp.add_constraint("a", Relation::less_equal, LinearExpr().add(x[0], 1).add(x[1], 1).add(x[2], 1), 4);
  lp.add_constraint("b", Relation::less_equal, LinearExpr().add(x[0], 2).add(x[2], Rational(1, 3)), 5);
  lp.add_constraint("c", Relation::less_equal, LinearExpr().add(x[1], 1).add(x[2], 3).add(x[3], -1), 6);
  lp.add_constraint("d", Relation::greater_equal, LinearExpr().add(x[0], 1).add(x[3], 1), 1);
  auto sol = solve_exact(lp);
  auto oracle = enumerate_bases_oracle(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  ASSERT_EQ(oracle.status, Status::optimal);
  EXPECT_EQ(sol.objective, oracle.objective);
  EXPECT_TRUE(check_certificates(lp, sol).ok());
}

TEST(Simplex, OracleAgreesOnRandomTinyPrograms) {
  int statuses[3] = {0, 0, 0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto lp = test::tiny_lp(seed);
    auto sol = solve_exact(lp);
    auto oracle = enumerate_bases_oracle(lp);
    ASSERT_EQ(sol.status, oracle.status) << "seed " << seed << "\n" << dump_lp(lp);
    ++statuses[static_cast<int>(sol.status)];
    if (sol.status == Status::optimal) {
      EXPECT_EQ(sol.objective, oracle.objective) << "seed " << seed;
      EXPECT_TRUE(check_certificates(lp, sol).ok()) << "seed " << seed;
    }
  }
  // the generator must exercise every outcome
  EXPECT_GT(statuses[0], 10);
  EXPECT_GT(statuses[1], 0);
  EXPECT_GT(statuses[2], 0);
}

TEST(Simplex, FloatingModeMatchesExact) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto lp = test::tiny_lp(seed);
    auto exact = solve_exact(lp);
    auto fl = solve<double>(lp);
    ASSERT_EQ(exact.status, fl.status) << "seed " << seed;
    if (exact.status == Status::optimal) {
      EXPECT_NEAR(fl.objective, exact.objective.get_d(), 1e-9);
    }
  }
}

TEST(Simplex, BlandRuleTerminatesOnBeale) {
  auto lp = beale();
  SolveOptions o;
  o.trace = true;
  auto sol = solve_exact(lp, o);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_EQ(sol.objective, Rational(-1, 20));
  std::set<std::vector<std::size_t>> seen;
  for (const auto& b : sol.basis_trace) EXPECT_TRUE(seen.insert(b).second) << "basis repeated";
}

TEST(Simplex, NoBasisRepeatsOnRandomPrograms) {
  SolveOptions o;
  o.trace = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto sol = solve_exact(test::tiny_lp(seed), o);
    std::set<std::vector<std::size_t>> seen;
    for (const auto& b : sol.basis_trace) EXPECT_TRUE(seen.insert(b).second) << "seed " << seed;
  }
}

TEST(Simplex, PhaseTwoObjectiveIsMonotone) {
  // Every phase-two basis is primal feasible, so its objective bounds the
  // optimum from the primal side and never moves away from it.
  SolveOptions o;
  o.trace = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto lp = test::tiny_lp(seed);
    auto sol = solve_exact(lp, o);
    if (sol.status != Status::optimal) continue;
    for (std::size_t i = 0; i < sol.objective_trace.size(); ++i) {
      const auto& v = sol.objective_trace[i];
      if (lp.sense() == Sense::minimize) {
        EXPECT_GE(v, sol.objective);
        if (i) {
          EXPECT_LE(v, sol.objective_trace[i - 1]);
        }
      } else {
        EXPECT_LE(v, sol.objective);
        if (i) {
          EXPECT_GE(v, sol.objective_trace[i - 1]);
        }
      }
    }
  }
}

TEST(Simplex, WeakDualityAlongTheTrace) {
  // any feasible dual point bounds every primal feasible objective
  SolveOptions o;
  o.trace = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto lp = test::tiny_lp(seed);
    auto sol = solve_exact(lp, o);
    if (sol.status != Status::optimal) continue;
    auto dual = dualize(lp);
    auto dsol = solve_exact(dual);
    ASSERT_EQ(dsol.status, Status::optimal);
    for (const auto& v : sol.objective_trace) {
      if (lp.sense() == Sense::minimize)
        EXPECT_GE(v, dsol.objective);
      else
        EXPECT_LE(v, dsol.objective);
    }
  }
}

TEST(Simplex, DualizeAgreesWithShadowPrices) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto lp = test::tiny_lp(seed);
    auto sol = solve_exact(lp);
    auto dual = dualize(lp);
    auto dsol = solve_exact(dual);
    if (sol.status == Status::optimal) {
      ASSERT_EQ(dsol.status, Status::optimal) << "seed " << seed;
      EXPECT_EQ(dsol.objective, sol.objective) << "seed " << seed;
      // the solver's multipliers are feasible for the explicit dual
      std::vector<Rational> y(dual.variables().size());
      for (std::size_t r = 0; r < lp.constraints().size(); ++r) {
        const auto& name = lp.constraints()[r].name;
        if (dual.has_variable("dual[" + name + "]")) y[dual.variable("dual[" + name + "]")] = sol.duals[r];
        if (dual.has_variable("neg[" + name + "]")) y[dual.variable("neg[" + name + "]")] = -sol.duals[r];
      }
      EXPECT_EQ(evaluate(dual, y).max_violation, 0) << "seed " << seed;
    } else if (sol.status == Status::unbounded) {
      EXPECT_EQ(dsol.status, Status::infeasible) << "seed " << seed;
    }
  }
}

TEST(Certificates, FlagCorruptedSolutions) {
  auto lp = single_bound();
  auto sol = solve_exact(lp);
  EXPECT_TRUE(check_certificates(lp, sol).ok());

  auto broken = sol;
  broken.primal[0] = Rational(1, 2);
  EXPECT_GT(check_certificates(lp, broken).primal_residual, 0);

  LinearProgram cap(Sense::minimize);
  auto x = cap.add_variable("x", VarSign::free);
  cap.set_objective(x, -1);
  cap.add_constraint("cap", Relation::less_equal, LinearExpr().add(x, 1), 3);
  auto s = solve_exact(cap);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_TRUE(check_certificates(cap, s).ok());
  s.duals[0] = -s.duals[0];
  EXPECT_GT(check_certificates(cap, s).dual_sign_violation, 0);
}

TEST(Simplex, PivotLimitIsEnforced) {
  SolveOptions o;
  o.max_pivots = 0;
  EXPECT_THROW(solve_exact(beale(), o), SolverError);
}

TEST(Oracle, RefusesLargePrograms) {
  LinearProgram lp;
  for (int j = 0; j < 15; ++j) lp.add_variable("x" + std::to_string(j), VarSign::nonnegative);
  EXPECT_THROW(enumerate_bases_oracle(lp), OracleSizeError);
}
