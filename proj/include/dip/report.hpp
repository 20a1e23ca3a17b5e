#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "dip/bounds.hpp"
#include "dip/dual_programs.hpp"
#include "dip/market.hpp"
#include "dip/primal_programs.hpp"

namespace dip {

// Exact scalars travel as rational strings, floating ones as JSON numbers.
template <class S>
nlohmann::json scalar_json(const S& x) {
  if constexpr (Numeric<S>::exact)
    return to_string(x);
  else
    return x;
}

template <class S>
S scalar_from_json(const nlohmann::json& j) {
  if constexpr (Numeric<S>::exact)
    return parse_scalar(j.get<std::string>());
  else
    return j.get<double>();
}

template <class S>
nlohmann::json optional_json(const std::optional<S>& x) {
  return x ? scalar_json(*x) : nlohmann::json(nullptr);
}

template <class S>
std::optional<S> optional_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return scalar_from_json<S>(j);
}

template <class S>
nlohmann::json quote_to_json(const PriceQuote<S>& q) {
  nlohmann::json j;
  j["agent"] = to_string(q.agent);
  j["info"] = to_string(q.info);
  j["price"] = scalar_json(q.price);
  auto& st = j["strategy"] = nlohmann::json::object();
  for (const auto& [node, h] : q.strategy)
    for (const auto& x : h) st[node].push_back(scalar_json(x));
  return j;
}

template <class S>
PriceQuote<S> quote_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"agent", "info", "price", "strategy"}, "quote");
  PriceQuote<S> q;
  auto agent = j.at("agent").get<std::string>();
  auto info = j.at("info").get<std::string>();
  if (agent != "seller" && agent != "buyer") throw ValidationError("quote agent must be seller or buyer");
  if (info != "delayed" && info != "full") throw ValidationError("quote info must be delayed or full");
  q.agent = agent == "seller" ? Agent::seller : Agent::buyer;
  q.info = info == "delayed" ? Information::delayed : Information::full;
  q.price = scalar_from_json<S>(j.at("price"));
  for (const auto& item : j.at("strategy").items())
    for (const auto& x : item.value()) q.strategy[item.key()].push_back(scalar_from_json<S>(x));
  return q;
}

template <class S>
nlohmann::json audit_to_json(const Market& m, const AuditReport<S>& a, double tol = 1e-9) {
  nlohmann::json j;
  j["max_violation"] = scalar_json(a.max_violation);
  j["violations"] = nlohmann::json::object();
  for (const auto& [name, amount] : a.violations) j["violations"][name] = scalar_json(amount);
  j["terminal_surplus"] = nlohmann::json::object();
  for (std::size_t k = 0; k < a.terminal_surplus.size(); ++k)
    j["terminal_surplus"][m.vertex(m.terminals()[k]).id] = scalar_json(a.terminal_surplus[k]);
  j["passed"] = a.passed(tol);
  return j;
}

template <class S>
AuditReport<S> audit_from_json(const Market& m, const nlohmann::json& j) {
  AuditReport<S> a;
  a.max_violation = scalar_from_json<S>(j.at("max_violation"));
  for (const auto& item : j.at("violations").items())
    a.violations.emplace_back(item.key(), scalar_from_json<S>(item.value()));
  for (std::size_t leaf : m.terminals())
    a.terminal_surplus.push_back(scalar_from_json<S>(j.at("terminal_surplus").at(m.vertex(leaf).id)));
  return a;
}

#define DIP_REPORT_FIELDS(X)                                                                        \
  X(p_tilde) X(d_tilde) X(exact_dual) X(alpha) X(beta) X(seller_full) X(buyer_delayed) X(buyer_full) \
  X(buyer_d_tilde) X(alpha_inf) X(gap) X(d_minus_alpha) X(beta_minus_alpha)

template <class S>
nlohmann::json report_to_json(const Market& m, const PriceReport<S>& r, double tol = 1e-9) {
  nlohmann::json j;
  j["mode"] = Numeric<S>::exact ? "exact" : "float";
  j["outcome"] = to_string(r.outcome);
  j["message"] = r.message;
#define DIP_PUT(f) j[#f] = optional_json(r.f);
  DIP_REPORT_FIELDS(DIP_PUT)
#undef DIP_PUT
  j["checks"] = nlohmann::json::object();
  for (const auto& c : r.checks) j["checks"][c.name] = c.passed;
  j["hedge"] = r.hedge ? quote_to_json(*r.hedge) : nlohmann::json(nullptr);
  j["audit"] = r.audit ? audit_to_json(m, *r.audit, tol) : nlohmann::json(nullptr);
  return j;
}

template <class S>
PriceReport<S> report_from_json(const Market& m, const nlohmann::json& j) {
  PriceReport<S> r;
  auto outcome = j.at("outcome").get<std::string>();
  r.outcome = outcome == "priced" ? Outcome::priced : outcome == "arbitrage" ? Outcome::arbitrage
                                                                              : Outcome::solver_failure;
  r.message = j.at("message").get<std::string>();
#define DIP_GET(f) r.f = optional_from_json<S>(j.at(#f));
  DIP_REPORT_FIELDS(DIP_GET)
#undef DIP_GET
  for (const auto& item : j.at("checks").items()) r.checks.push_back({item.key(), item.value().get<bool>()});
  if (!j.at("hedge").is_null()) r.hedge = quote_from_json<S>(j.at("hedge"));
  if (!j.at("audit").is_null()) r.audit = audit_from_json<S>(m, j.at("audit"));
  return r;
}

#undef DIP_REPORT_FIELDS

template <class S>
nlohmann::json gap_to_json(const GapReport<S>& g) {
  nlohmann::json j;
  j["primal_status"] = to_string(g.primal_status);
  j["dual_status"] = to_string(g.dual_status);
  j["p_tilde"] = optional_json(g.p_tilde);
  j["d_tilde"] = optional_json(g.d_tilde);
  j["gap"] = optional_json(g.gap);
  j["exact_dual"] = optional_json(g.exact_dual);
  return j;
}

inline nlohmann::json measure_to_json(const Market& m, const ProbabilityMeasure& q) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t k = 0; k < q.q.size(); ++k) j[m.vertex(m.terminals()[k]).id] = to_string(q.q[k]);
  return j;
}

}  // namespace dip
