#include <gtest/gtest.h>

#include "support.hpp"

using namespace dip;
using dip::test::q;

namespace {

struct Binomial {
  Market m = test::load("binomial_market.json");
  DelayedView g = derive_delayed_view(m);
  Claim call = test::load(m, "binomial_call.json");
};

Rational value(const LinearProgram& lp) {
  auto sol = solve_exact(lp);
  EXPECT_EQ(sol.status, Status::optimal);
  return sol.objective;
}

// Static-portfolio program over the five distinct terminal stock prices of
// the binomial fixture: a + b s >= (s-4)^+ (seller) or <= (buyer). Small
// enough for the basis-enumeration oracle.
LinearProgram static_call_lp(bool seller) {
  LinearProgram lp(seller ? Sense::minimize : Sense::maximize);
  auto a = lp.add_variable("a", VarSign::free);
  auto b = lp.add_variable("b", VarSign::free);
  lp.set_objective(a, 1);
  lp.set_objective(b, 4);
  for (const char* s : {"1/4", "1", "4", "16", "64"}) {
    Rational x = q(s);
    Rational pay = x > 4 ? Rational(x - 4) : Rational(0);
    lp.add_constraint(std::string("s=") + s, seller ? Relation::greater_equal : Relation::less_equal,
                      LinearExpr().add(a, 1).add(b, x), pay);
  }
  return lp;
}

}  // namespace

// --- primal programs ---------------------------------------------------------

TEST(SellerDelayed, BinomialFamilies) {
  Binomial f;
  auto lp = build_seller_delayed_lp(f.m, f.g, f.call);
  // kappa plus two holdings at each of the 1 + 1 + 2 + 4 trading vertices
  EXPECT_EQ(lp.variables().size(), 17u);
  int budget = 0, replicate = 0, rebalance = 0;
  for (const auto& c : lp.constraints()) {
    budget += c.name == "budget";
    replicate += c.name.rfind("replicate[", 0) == 0;
    rebalance += c.name.rfind("rebalance[", 0) == 0;
  }
  EXPECT_EQ(budget, 1);
  EXPECT_EQ(replicate, 16);
  EXPECT_EQ(rebalance, 2 + 4 + 8);
  EXPECT_EQ(lp.constraints().size(), 31u);
}

TEST(SellerDelayed, BinomialGoldenPrice) {
  Binomial f;
  auto oracle = enumerate_bases_oracle(static_call_lp(true));
  ASSERT_EQ(oracle.status, Status::optimal);
  EXPECT_EQ(oracle.objective, q("60/17"));
  EXPECT_EQ(value(build_seller_delayed_lp(f.m, f.g, f.call)), q("60/17"));
}

TEST(SellerDelayed, ConstantAndZeroClaims) {
  for (const char* name : {"binomial_market.json", "small_tree_market.json", "single_path_market.json"}) {
    auto m = test::load(name);
    auto g = derive_delayed_view(m);
    EXPECT_EQ(value(build_seller_delayed_lp(m, g, Claim::constant(m, q("7/3")))), q("7/3")) << name;
    EXPECT_EQ(value(build_seller_delayed_lp(m, g, Claim::constant(m, 0))), 0) << name;
  }
}

TEST(BuyerDelayed, Binomial) {
  Binomial f;
  auto oracle = enumerate_bases_oracle(static_call_lp(false));
  ASSERT_EQ(oracle.status, Status::optimal);
  auto buyer = value(build_buyer_delayed_lp(f.m, f.g, f.call));
  EXPECT_EQ(buyer, oracle.objective);
  EXPECT_EQ(buyer, 0);
  EXPECT_LE(buyer, value(build_seller_delayed_lp(f.m, f.g, f.call)));
  EXPECT_EQ(value(build_buyer_delayed_lp(f.m, f.g, Claim::constant(f.m, 3))), 3);
  EXPECT_EQ(value(build_buyer_delayed_lp(f.m, f.g, Claim::constant(f.m, 0))), 0);
}

TEST(SellerFull, Binomial) {
  Binomial f;
  EXPECT_EQ(value(build_seller_full_lp(f.m, f.call)), q("52/27"));
  EXPECT_EQ(value(build_seller_full_lp(f.m, Claim::constant(f.m, 3))), 3);
  auto chain = test::load("single_path_market.json");
  EXPECT_EQ(value(build_seller_full_lp(chain, test::load(chain, "single_path_claim.json"))), 5);
}

TEST(Audit, OptimalQuotePasses) {
  Binomial f;
  auto res = solve_quote(f.m, f.g, f.call, Agent::seller, Information::delayed);
  ASSERT_TRUE(res.quote);
  auto a = audit_hedge(f.m, f.g, f.call, *res.quote);
  EXPECT_TRUE(a.passed());
  EXPECT_TRUE(a.violations.empty());
  for (const auto& s : a.terminal_surplus) EXPECT_GE(s, 0);
}

TEST(Audit, PerturbedInitialHoldingIsFlagged) {
  Binomial f;
  auto quote = *solve_quote(f.m, f.g, f.call, Agent::seller, Information::delayed).quote;
  quote.strategy.at("G0:r")[1] += 1;
  auto a = audit_hedge(f.m, f.g, f.call, quote);
  EXPECT_FALSE(a.passed());
  ASSERT_FALSE(a.violations.empty());
  bool named = false;
  for (const auto& [name, amount] : a.violations) named = named || name == "budget" || name.rfind("rebalance[", 0) == 0;
  EXPECT_TRUE(named);
}

TEST(Audit, ConstantClaimReplicatesExactly) {
  Binomial f;
  auto c = Claim::constant(f.m, q("5/2"));
  auto quote = *solve_quote(f.m, f.g, c, Agent::seller, Information::delayed).quote;
  auto a = audit_hedge(f.m, f.g, c, quote);
  EXPECT_TRUE(a.passed());
  for (const auto& s : a.terminal_surplus) EXPECT_EQ(s, 0);
}

TEST(Audit, RejectsStrategyOnTheWrongTree) {
  Binomial f;
  auto quote = *solve_quote(f.m, f.g, f.call, Agent::seller, Information::full).quote;
  quote.info = Information::delayed;
  EXPECT_THROW(audit_hedge(f.m, f.g, f.call, quote), ValidationError);
}

// --- dual programs ------------------------------------------------------------

TEST(RawDual, MatchesSellerPrimal) {
  Binomial f;
  EXPECT_EQ(value(build_dual_raw(f.m, f.g, f.call)), q("60/17"));
  EXPECT_EQ(value(build_dual_raw(f.m, f.g, Claim::constant(f.m, 0))), 0);

  auto lp = build_dual_raw(f.m, f.g, f.call);
  auto sol = solve_exact(lp);
  EXPECT_EQ(sol.value(lp, "y0"), 1);
}

TEST(RawDual, IsTheMechanicalDualOfTheSellerProgram) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = random_instance(seed);
    auto g = derive_delayed_view(inst.market);
    auto primal = build_seller_delayed_lp(inst.market, g, inst.claim);
    EXPECT_EQ(value(dualize(primal)), value(build_dual_raw(inst.market, g, inst.claim))) << "seed " << seed;
  }
}

TEST(RawDual, RecoveredMultipliersAreFeasible) {
  Binomial f;
  auto lp = build_seller_delayed_lp(f.m, f.g, f.call);
  auto sol = solve_exact(lp);
  auto p = dual_point_from_seller_solution(f.m, f.g, lp, sol, DualForm::raw);
  EXPECT_EQ(p.y0, 1);
  EXPECT_TRUE(check_dual_feasibility(f.m, p).feasible);
  EXPECT_TRUE(check_mass_identity(f.m, p));
}

TEST(MeasureDual, Binomial) {
  Binomial f;
  EXPECT_EQ(value(build_measure_dual(f.m, f.call)), q("60/17"));
  EXPECT_EQ(value(build_measure_dual(f.m, Claim::constant(f.m, 4))), 4);
  auto chain = test::load("single_path_market.json");
  EXPECT_EQ(value(build_measure_dual(chain, test::load(chain, "single_path_claim.json"))), 5);
}

TEST(MeasureDual, OptimalPointSatisfiesMassIdentity) {
  Binomial f;
  auto lp = build_measure_dual(f.m, f.call);
  auto sol = solve_exact(lp);
  auto p = dual_point_from_measure_solution(f.m, lp, sol, DualForm::measure);
  EXPECT_TRUE(check_mass_identity(f.m, p));
  auto doubled = p;
  doubled.z.begin()->second *= 2;
  EXPECT_FALSE(check_mass_identity(f.m, doubled));
}

TEST(MeasureDual, ExactFormAlwaysMatchesThePrimal) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = random_instance(seed);
    auto g = derive_delayed_view(inst.market);
    EXPECT_EQ(value(build_exact_measure_dual(inst.market, inst.claim)),
              value(build_seller_delayed_lp(inst.market, g, inst.claim)))
        << "seed " << seed;
  }
}

TEST(NoGap, BinomialAndConstant) {
  Binomial f;
  auto r = verify_no_gap(f.m, f.g, f.call);
  ASSERT_TRUE(r.gap);
  EXPECT_EQ(*r.gap, 0);
  auto c = verify_no_gap(f.m, f.g, Claim::constant(f.m, 2));
  EXPECT_EQ(*c.p_tilde, 2);
  EXPECT_EQ(*c.d_tilde, 2);
}

TEST(NoGap, HoldsWithOneRiskyAsset) {
  RandomMarketSpec spec;
  spec.min_risky = spec.max_risky = 1;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = random_instance(seed, spec);
    auto r = verify_no_gap(inst.market, derive_delayed_view(inst.market), inst.claim);
    ASSERT_TRUE(r.gap) << "seed " << seed;
    EXPECT_EQ(*r.gap, 0) << "seed " << seed;
  }
}

TEST(NoGap, MeasureFormRelaxesWithTwoRiskyAssets) {
  // With two risky assets the measure form drops the w-multipliers' coupling
  // and can only go up; the unreduced dual still equals the primal.
  RandomMarketSpec spec;
  spec.min_risky = spec.max_risky = 2;
  int strict = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = random_instance(seed, spec);
    auto r = verify_no_gap(inst.market, derive_delayed_view(inst.market), inst.claim);
    ASSERT_TRUE(r.p_tilde && r.d_tilde && r.exact_dual);
    EXPECT_EQ(*r.exact_dual, *r.p_tilde) << "seed " << seed;
    EXPECT_GE(*r.d_tilde, *r.p_tilde) << "seed " << seed;
    strict += *r.d_tilde > *r.p_tilde;
  }
  EXPECT_GT(strict, 0);
}

// --- bounds ------------------------------------------------------------------

TEST(Martingale, BinomialIsComplete) {
  Binomial f;
  EXPECT_EQ(value(build_martingale_lp(f.m, f.call)), q("52/27"));
  EXPECT_EQ(value(build_martingale_lp(f.m, f.call, Sense::minimize)), q("52/27"));
  auto dom = test::load("dominant_asset_market.json");
  EXPECT_EQ(solve_exact(build_martingale_lp(dom, Claim::constant(dom, 1))).status, Status::infeasible);
}

TEST(Emm, Witnesses) {
  Binomial f;
  auto emm = check_emm_exists(f.m);
  ASSERT_TRUE(emm);
  for (std::size_t k = 0; k < f.m.terminals().size(); ++k) {
    const auto& id = f.m.vertex(f.m.terminals()[k]).id;
    Rational expect = 1;
    for (char c : id) expect *= c == 'u' ? Rational(1, 3) : Rational(2, 3);
    EXPECT_EQ(emm.witness->q[k], expect) << id;
  }
  EXPECT_FALSE(check_emm_exists(test::load("dominant_asset_market.json")));
  auto chain = check_emm_exists(test::load("single_path_market.json"));
  ASSERT_TRUE(chain);
  EXPECT_EQ(chain.witness->q, std::vector<Rational>{1});
}

TEST(Squeeze, BinomialGoldenValue) {
  Binomial f;
  auto lp = build_squeeze_lp(f.m, f.call);
  auto oracle = enumerate_bases_oracle(lp, 16);
  ASSERT_EQ(oracle.status, Status::optimal);
  EXPECT_EQ(oracle.objective, q("49/17"));
  auto beta = value(lp);
  EXPECT_EQ(beta, q("49/17"));
  EXPECT_LE(q("52/27"), beta);
  EXPECT_LE(beta, q("60/17"));
}

TEST(Squeeze, ConstantAndSinglePath) {
  Binomial f;
  EXPECT_EQ(value(build_squeeze_lp(f.m, Claim::constant(f.m, 6))), 6);
  auto chain = test::load("single_path_market.json");
  auto b = test::load(chain, "single_path_claim.json");
  EXPECT_EQ(value(build_squeeze_lp(chain, b)), 5);
  EXPECT_EQ(value(build_measure_dual(chain, b)), 5);
}

TEST(Lift, BinomialMeasure) {
  Binomial f;
  auto emm = check_emm_exists(f.m);
  auto p = lift_emm_to_dual_point(f.m, *emm.witness);
  EXPECT_TRUE(check_dual_feasibility(f.m, p).feasible);
  EXPECT_TRUE(check_mass_identity(f.m, p));
  auto lp = build_measure_dual(f.m, f.call);
  EXPECT_EQ(objective_value(lp, dual_assignment(lp, p)), q("52/27"));
}

TEST(Lift, SinglePathIsAllOnes) {
  auto chain = test::load("single_path_market.json");
  auto p = lift_emm_to_dual_point(chain, ProbabilityMeasure{{Rational(1)}});
  for (const auto& [id, y] : p.y) EXPECT_EQ(y, 1) << id;
  EXPECT_TRUE(check_dual_feasibility(chain, p).feasible);
}

TEST(Lift, RejectsNonMartingale) {
  Binomial f;
  ProbabilityMeasure uniform;
  uniform.q.assign(16, Rational(1, 16));
  EXPECT_THROW(lift_emm_to_dual_point(f.m, uniform), LiftError);
  EXPECT_THROW(lift_squeeze_to_dual_point(f.m, uniform), LiftError);
}

TEST(Lift, SqueezeOptimum) {
  Binomial f;
  auto lp = build_squeeze_lp(f.m, f.call);
  auto sol = solve_exact(lp);
  auto qm = measure_from_solution(f.m, lp, sol);
  auto p = lift_squeeze_to_dual_point(f.m, qm);
  EXPECT_TRUE(check_dual_feasibility(f.m, p).feasible);
  EXPECT_TRUE(check_mass_identity(f.m, p));
  auto dual = build_measure_dual(f.m, f.call);
  EXPECT_EQ(objective_value(dual, dual_assignment(dual, p)), sol.objective);

  // martingale measures are feasible for the intermediate program, and both
  // lifts coincide on them
  auto emm = *check_emm_exists(f.m).witness;
  auto a = lift_emm_to_dual_point(f.m, emm);
  auto b = lift_squeeze_to_dual_point(f.m, emm);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.z, b.z);
}

TEST(PriceReport, ConstantClaimPricesAgree) {
  Binomial f;
  auto r = price_report(f.m, f.g, Claim::constant(f.m, q("9/4")));
  ASSERT_EQ(r.outcome, Outcome::priced);
  for (const auto* p : {&r.p_tilde, &r.d_tilde, &r.alpha, &r.beta, &r.seller_full, &r.buyer_delayed,
                        &r.buyer_full})
    EXPECT_EQ(**p, q("9/4"));
  EXPECT_EQ(*r.gap, 0);
  EXPECT_TRUE(r.all_checks_passed());
}

TEST(PriceReport, Binomial) {
  Binomial f;
  auto r = price_report(f.m, f.g, f.call);
  EXPECT_EQ(*r.alpha, q("52/27"));
  EXPECT_GE(*r.d_minus_alpha, 0);
  EXPECT_TRUE(r.all_checks_passed());
  EXPECT_TRUE(r.audit->passed());
}

TEST(PriceReport, DominantAssetIsArbitrage) {
  auto m = test::load("dominant_asset_market.json");
  auto r = price_report(m, derive_delayed_view(m), test::load(m, "dominant_asset_claim.json"));
  EXPECT_EQ(r.outcome, Outcome::arbitrage);
  EXPECT_FALSE(r.p_tilde);
  EXPECT_FALSE(r.alpha);
}
