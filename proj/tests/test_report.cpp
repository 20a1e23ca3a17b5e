#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace dip;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stdout and stderr captured into one string.
Run cli(const std::string& args) {
  const std::string log = ::testing::TempDir() + "dip_cli_output.txt";
  const std::string cmd = std::string(DIP_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string market_args(const std::string& market, const std::string& claim) {
  return "--market " + test::data(market) + " --claim " + test::data(claim);
}

}  // namespace

TEST(Report, ExactRoundTrip) {
  auto m = test::load("binomial_market.json");
  auto b = test::load(m, "binomial_call.json");
  auto r = price_report(m, derive_delayed_view(m), b);
  auto j = report_to_json(m, r);
  auto back = report_from_json<Rational>(m, j);
  EXPECT_EQ(report_to_json(m, back), j);
  EXPECT_EQ(back.p_tilde, r.p_tilde);
  EXPECT_EQ(back.hedge->strategy, r.hedge->strategy);
  EXPECT_EQ(back.audit->terminal_surplus, r.audit->terminal_surplus);
  EXPECT_EQ(j["gap"], "0");
  EXPECT_EQ(j["alpha"], "52/27");
}

TEST(Report, FloatRoundTrip) {
  auto m = test::load("small_tree_market.json");
  auto b = test::load(m, "small_tree_claim.json");
  auto r = price_report<double>(m, derive_delayed_view(m), b);
  auto j = report_to_json(m, r);
  EXPECT_TRUE(j["p_tilde"].is_number());
  EXPECT_EQ(report_to_json(m, report_from_json<double>(m, j)), j);
}

TEST(Report, ShortHorizonHasNoBeta) {
  auto m = test::load("small_tree_market.json");
  auto r = price_report(m, derive_delayed_view(m), test::load(m, "small_tree_claim.json"));
  EXPECT_EQ(r.outcome, Outcome::priced);
  EXPECT_FALSE(r.beta);
  EXPECT_TRUE(r.all_checks_passed());
}

TEST(Cli, PriceBinomial) {
  const std::string out = ::testing::TempDir() + "binomial_report.json";
  auto r = cli("price " + market_args("binomial_market.json", "binomial_call.json") + " --out " + out);
  EXPECT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j["gap"], "0");
  EXPECT_EQ(j["p_tilde"], "60/17");
  EXPECT_EQ(j["beta"], "49/17");
}

TEST(Cli, PriceIsByteIdenticalAcrossRuns) {
  auto a = cli("price " + market_args("binomial_market.json", "binomial_call.json"));
  auto b = cli("price " + market_args("binomial_market.json", "binomial_call.json"));
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, PriceConstantClaim) {
  auto r = cli("price " + market_args("binomial_market.json", "binomial_constant.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  for (const char* k : {"p_tilde", "d_tilde", "alpha", "beta", "seller_full", "buyer_delayed", "buyer_full"})
    EXPECT_EQ(j[k], "3") << k;
}

TEST(Cli, FloatMode) {
  auto r = cli("price --mode float --tol 1e-9 " + market_args("binomial_market.json", "binomial_call.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["p_tilde"].get<double>(), 60.0 / 17, 1e-9);
}

TEST(Cli, MalformedMarket) {
  auto r = cli("price --market " + test::test_data("malformed_market.json") + " --claim " +
               test::data("binomial_call.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("parse"), std::string::npos) << r.out;
}

TEST(Cli, ClaimForAnotherMarket) {
  auto r = cli("price " + market_args("small_tree_market.json", "binomial_call.json"));
  EXPECT_EQ(r.code, 2) << r.out;
}

TEST(Cli, PriceArbitrageMarket) {
  auto r = cli("price " + market_args("dominant_asset_market.json", "dominant_asset_claim.json"));
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST(Cli, Arbitrage) {
  auto bin = cli("arbitrage --market " + test::data("binomial_market.json"));
  ASSERT_EQ(bin.code, 0) << bin.out;
  auto j = nlohmann::json::parse(bin.out);
  EXPECT_EQ(j["uuuu"], "1/81");
  EXPECT_EQ(j["dddd"], "16/81");

  auto dom = cli("arbitrage --market " + test::data("dominant_asset_market.json"));
  EXPECT_EQ(dom.code, 3);
  EXPECT_NE(dom.out.find("no martingale measure"), std::string::npos);

  auto chain = cli("arbitrage --market " + test::data("single_path_market.json"));
  ASSERT_EQ(chain.code, 0);
  EXPECT_EQ(nlohmann::json::parse(chain.out)["c4"], "1");
}

TEST(Cli, Audit) {
  auto r = cli("audit " + market_args("binomial_market.json", "binomial_call.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["audit"]["passed"].get<bool>());

  // a perturbed quote read back from disk fails the audit
  auto quote = j["quote"];
  quote["strategy"]["G0:r"][1] = "1000";
  const std::string path = ::testing::TempDir() + "bad_quote.json";
  std::ofstream(path) << quote.dump();
  auto bad = cli("audit " + market_args("binomial_market.json", "binomial_call.json") + " --quote " + path);
  EXPECT_EQ(bad.code, 1) << bad.out;
}

TEST(Cli, VerifyUsage) {
  EXPECT_EQ(cli("verify --trials 0").code, 2);
  EXPECT_EQ(cli("verify --mode fuzzy").code, 2);
  EXPECT_EQ(cli("").code, 2);
}

TEST(Cli, VerifyOneAssetTrials) {
  auto r = cli("verify --seed 3 --trials 4 --risky 1");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("4/4 passed"), std::string::npos) << r.out;
  EXPECT_EQ(r.out, cli("verify --seed 3 --trials 4 --risky 1").out);
}

TEST(Cli, VerifyDumpsFailures) {
  const std::string dump = ::testing::TempDir() + "verify_dump.json";
  std::remove(dump.c_str());
  auto r = cli("verify --seed 3 --trials 2 --risky 2 --out " + dump);
  // the reduced measure form is loose with two risky assets
  EXPECT_EQ(r.code, 1) << r.out;
  auto j = nlohmann::json::parse(slurp(dump));
  ASSERT_FALSE(j.empty());
  RandomMarketSpec spec;
  spec.min_risky = spec.max_risky = 2;
  auto again = market_from_json(j[0]["market"]);
  EXPECT_EQ(dump_market(again), dump_market(random_instance(j[0]["seed"].get<std::uint64_t>(), spec).market));
}
