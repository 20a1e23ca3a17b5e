// Command-line front end: price, verify, arbitrage, audit.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input,
// 3 arbitrage or infeasible program.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dip/dip.hpp"

namespace {

enum Exit { ok = 0, verification_failed = 1, invalid_input = 2, arbitrage = 3 };

struct RunConfig {
  std::string market;
  std::string claim;
  std::string mode = "exact";
  double tol = 1e-9;
  std::uint64_t seed = 1;
  int trials = 50;
  std::string out;
  std::string risky = "mixed";
  std::string quote;
  std::string dump_lp;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw dip::ValidationError("cannot write \"" + cfg.out + "\"");
  f << text << "\n";
}

dip::ReportOptions report_options(const RunConfig& cfg) {
  dip::ReportOptions o;
  o.solve.tolerance = cfg.tol;
  o.rel_tol = cfg.tol;
  return o;
}

template <class S>
int price(const RunConfig& cfg, const dip::Market& m, const dip::Claim& b) {
  auto g = dip::derive_delayed_view(m);
  auto rep = dip::price_report<S>(m, g, b, report_options(cfg));
  emit(cfg, dip::report_to_json(m, rep, cfg.tol).dump(2));
  if (rep.outcome != dip::Outcome::priced) {
    std::cerr << "error: " << dip::to_string(rep.outcome) << ": " << rep.message << "\n";
    return arbitrage;
  }
  for (const auto& c : rep.checks)
    if (!c.passed) std::cerr << "warning: check " << c.name << " failed\n";
  return ok;
}

int cmd_price(const RunConfig& cfg) {
  auto m = dip::load_market_file(cfg.market);
  auto b = dip::load_claim_file(m, cfg.claim);
  if (!cfg.dump_lp.empty()) {
    std::ofstream f(cfg.dump_lp);
    f << dip::dump_lp(dip::build_seller_delayed_lp(m, dip::derive_delayed_view(m), b));
  }
  return cfg.mode == "exact" ? price<dip::Rational>(cfg, m, b) : price<double>(cfg, m, b);
}

struct TrialResult {
  bool passed = true;
  std::vector<std::string> failures;
  bool exact_dual_agrees = true;
  bool beta_strict_above_alpha = false;
  bool beta_strict_below_d = false;
};

template <class S>
TrialResult run_trial(const RunConfig& cfg, const dip::RandomInstance& inst) {
  dip::ReportOptions o = report_options(cfg);
  o.with_hedge = false;
  auto g = dip::derive_delayed_view(inst.market);
  auto rep = dip::price_report<S>(inst.market, g, inst.claim, o);
  TrialResult r;
  auto require = [&](const char* name) {
    const auto* c = rep.find_check(name);
    if (!c || !c->passed) {
      r.passed = false;
      r.failures.emplace_back(name);
    }
  };
  if (rep.outcome != dip::Outcome::priced) {
    r.passed = false;
    r.failures.push_back(std::string(dip::to_string(rep.outcome)) + ": " + rep.message);
    return r;
  }
  require("p_tilde_equals_d_tilde");
  require("alpha_le_beta");
  require("beta_le_d_tilde");
  const auto* exact = rep.find_check("p_tilde_equals_exact_dual");
  r.exact_dual_agrees = exact && exact->passed;
  r.beta_strict_above_alpha = *rep.beta > *rep.alpha + (dip::Numeric<S>::exact ? 0 : cfg.tol);
  r.beta_strict_below_d = *rep.beta + (dip::Numeric<S>::exact ? 0 : cfg.tol) < *rep.d_tilde;
  return r;
}

int cmd_verify(const RunConfig& cfg) {
  dip::RandomMarketSpec spec;
  if (cfg.risky == "1") spec.min_risky = spec.max_risky = 1;
  if (cfg.risky == "2") spec.min_risky = spec.max_risky = 2;

  int passed = 0, exact_agree = 0, strict_lo = 0, strict_hi = 0;
  nlohmann::json dump = nlohmann::json::array();
  for (int i = 0; i < cfg.trials; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    auto inst = dip::random_instance(seed, spec);
    auto r = cfg.mode == "exact" ? run_trial<dip::Rational>(cfg, inst) : run_trial<double>(cfg, inst);
    passed += r.passed;
    exact_agree += r.exact_dual_agrees;
    strict_lo += r.beta_strict_above_alpha;
    strict_hi += r.beta_strict_below_d;
    if (!r.passed) {
      std::cout << "trial " << i << " (seed " << seed << ", N=" << inst.risky << ") failed:";
      for (const auto& f : r.failures) std::cout << " " << f;
      std::cout << "\n";
      dump.push_back({{"trial", i},
                      {"seed", seed},
                      {"failures", r.failures},
                      {"market", dip::market_to_json(inst.market)},
                      {"claim", dip::claim_to_json(inst.market, inst.claim)}});
    }
  }
  std::cout << passed << "/" << cfg.trials << " passed\n"
            << "primal equals exact dual: " << exact_agree << "/" << cfg.trials << "\n"
            << "beta > alpha strictly: " << strict_lo << ", beta < d_tilde strictly: " << strict_hi << "\n";
  if (passed == cfg.trials) return ok;
  const std::string path = cfg.out.empty() ? "verify_failures.json" : cfg.out;
  std::ofstream f(path);
  f << dump.dump(2) << "\n";
  std::cout << "failing instances written to " << path << "\n";
  return verification_failed;
}

int cmd_arbitrage(const RunConfig& cfg) {
  auto m = dip::load_market_file(cfg.market);
  auto emm = dip::check_emm_exists(m);
  if (!emm) {
    std::cout << "no martingale measure (" << emm.reason << ")\n";
    return arbitrage;
  }
  emit(cfg, dip::measure_to_json(m, *emm.witness).dump(2));
  return ok;
}

template <class S>
int audit(const RunConfig& cfg, const dip::Market& m, const dip::Claim& b) {
  auto g = dip::derive_delayed_view(m);
  dip::PriceQuote<S> quote;
  if (!cfg.quote.empty()) {
    quote = dip::quote_from_json<S>(dip::detail::parse_document(dip::detail::read_file(cfg.quote), "quote"));
  } else {
    dip::SolveOptions so;
    so.tolerance = cfg.tol;
    auto res = dip::solve_quote<S>(m, g, b, dip::Agent::seller, dip::Information::delayed, so);
    if (!res.quote) {
      std::cerr << "error: delayed seller program is " << dip::to_string(res.status) << "\n";
      return arbitrage;
    }
    quote = std::move(*res.quote);
  }
  auto a = dip::audit_hedge(m, g, b, quote, dip::Numeric<S>::exact ? 0.0 : cfg.tol);
  nlohmann::json j{{"quote", dip::quote_to_json(quote)}, {"audit", dip::audit_to_json(m, a, cfg.tol)}};
  emit(cfg, j.dump(2));
  return a.passed(dip::Numeric<S>::exact ? 0.0 : cfg.tol) ? ok : verification_failed;
}

int cmd_audit(const RunConfig& cfg) {
  auto m = dip::load_market_file(cfg.market);
  auto b = dip::load_claim_file(m, cfg.claim);
  return cfg.mode == "exact" ? audit<dip::Rational>(cfg, m, b) : audit<double>(cfg, m, b);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-replication prices for traders with delayed information"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--mode", cfg.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--tol", cfg.tol, "tolerance in float mode")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output path (stdout if omitted)");
  };
  auto* price = app.add_subcommand("price", "price a claim and report every bound");
  price->add_option("--market", cfg.market)->required()->check(CLI::ExistingFile);
  price->add_option("--claim", cfg.claim)->required()->check(CLI::ExistingFile);
  price->add_option("--dump-lp", cfg.dump_lp, "write the delayed seller LP in text form");
  common(price);

  auto* verify = app.add_subcommand("verify", "randomized checks on generated markets");
  verify->add_option("--seed", cfg.seed);
  verify->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  verify->add_option("--risky", cfg.risky, "1, 2 or mixed")->check(CLI::IsMember({"1", "2", "mixed"}));
  common(verify);

  auto* arb = app.add_subcommand("arbitrage", "search for an equivalent martingale measure");
  arb->add_option("--market", cfg.market)->required()->check(CLI::ExistingFile);
  common(arb);

  auto* aud = app.add_subcommand("audit", "check a seller hedge against every scenario");
  aud->add_option("--market", cfg.market)->required()->check(CLI::ExistingFile);
  aud->add_option("--claim", cfg.claim)->required()->check(CLI::ExistingFile);
  aud->add_option("--quote", cfg.quote, "quote JSON to audit instead of the optimal one")->check(CLI::ExistingFile);
  common(aud);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invalid_input;
  }

  try {
    if (*price) return cmd_price(cfg);
    if (*verify) return cmd_verify(cfg);
    if (*arb) return cmd_arbitrage(cfg);
    return cmd_audit(cfg);
  } catch (const dip::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return invalid_input;
  } catch (const dip::ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return invalid_input;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return invalid_input;
  }
}
