#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dip/delayed_view.hpp"
#include "dip/lp.hpp"
#include "dip/market.hpp"
#include "dip/simplex.hpp"

namespace dip {

enum class Agent { seller, buyer };
enum class Information { delayed, full };

inline const char* to_string(Agent a) { return a == Agent::seller ? "seller" : "buyer"; }
inline const char* to_string(Information i) { return i == Information::delayed ? "delayed" : "full"; }

/// One portfolio vector (N+1 holdings) per trading vertex, keyed by vertex id:
/// G-vertex ids at times 0..T-1 for the delayed trader, F-vertex ids at
/// 0..T-1 for the fully informed one.
template <class S>
using HedgingStrategy = std::map<std::string, std::vector<S>>;

template <class S>
struct PriceQuote {
  S price{};
  HedgingStrategy<S> strategy;
  Agent agent = Agent::seller;
  Information info = Information::delayed;
};

namespace detail {

struct TradingNode {
  std::string name;
  std::optional<std::size_t> parent;
  // F-vertices whose prices the rebalancing into this node must respect.
  std::vector<std::size_t> atoms;
};

struct TradingTree {
  std::vector<TradingNode> nodes;  // nodes[0] is the root
  std::vector<std::size_t> holder;  // per terminal position: node holding into T
};

inline TradingTree delayed_tree(const Market& m, const DelayedView& g) {
  if (g.horizon() != m.horizon()) throw ValidationError("delayed view does not belong to this market");
  TradingTree tree;
  // G-vertices are numbered time by time, so times 0..T-1 form a prefix.
  std::size_t count = 0;
  for (int t = 0; t < m.horizon(); ++t) count += g.at_time(t).size();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& gv = g.vertex(i);
    TradingNode node{gv.id, gv.parent, {}};
    if (gv.time >= 1) node.atoms = g.rebalancing_atoms(m, i);
    tree.nodes.push_back(std::move(node));
  }
  for (std::size_t leaf : m.terminals()) tree.holder.push_back(g.final_holder(m, leaf));
  return tree;
}

inline TradingTree full_tree(const Market& m) {
  TradingTree tree;
  std::map<std::size_t, std::size_t> node_of;
  for (int t = 0; t < m.horizon(); ++t)
    for (std::size_t v : m.at_time(t)) {
      const auto& fv = m.vertex(v);
      TradingNode node{fv.id, std::nullopt, {}};
      if (fv.parent) {
        node.parent = node_of.at(*fv.parent);
        node.atoms = {v};
      }
      node_of[v] = tree.nodes.size();
      tree.nodes.push_back(std::move(node));
    }
  for (std::size_t leaf : m.terminals()) tree.holder.push_back(node_of.at(*m.vertex(leaf).parent));
  return tree;
}

inline TradingTree trading_tree(const Market& m, const DelayedView* g, Information info) {
  if (info == Information::full) return full_tree(m);
  if (!g) throw ValidationError("delayed programs need the delayed view");
  return delayed_tree(m, *g);
}

inline std::string holding_name(const std::string& node, std::size_t asset) {
  return "H[" + node + "][" + std::to_string(asset) + "]";
}

}  // namespace detail

/// Super-replication (seller) or sub-hedging (buyer) LP over a trading tree.
///
/// seller:  min k    s.t.  S_0.H_root <= k,   S_w.H_holder(w) >= B_w,
/// buyer:   max k    s.t.  S_0.H_root <= -k,  S_w.H_holder(w) >= -B_w,
///
/// and for both, for every non-root node v and each atom a of v:
/// S_a.H_v = S_a.H_parent(v). Holdings are free (no short-sale limits).
inline LinearProgram build_hedging_lp(const Market& m, const DelayedView* g, const Claim& b, Agent agent,
                                      Information info) {
  const auto tree = detail::trading_tree(m, g, info);
  const std::size_t assets = m.asset_count();
  LinearProgram lp(agent == Agent::seller ? Sense::minimize : Sense::maximize);

  std::size_t kappa = lp.add_variable("kappa", VarSign::free);
  lp.set_objective(kappa, 1);
  std::vector<std::size_t> first(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    first[i] = lp.variables().size();
    for (std::size_t a = 0; a < assets; ++a)
      lp.add_variable(detail::holding_name(tree.nodes[i].name, a), VarSign::free);
  }
  auto dot = [&](LinearExpr& e, std::size_t node, const std::vector<Rational>& s, const Rational& scale) {
    for (std::size_t a = 0; a < assets; ++a) e.add(first[node] + a, scale * s[a]);
  };

  {
    LinearExpr e;
    dot(e, 0, m.prices(m.root()), 1);
    e.add(kappa, agent == Agent::seller ? -1 : 1);
    lp.add_constraint("budget", Relation::less_equal, e, 0);
  }
  for (std::size_t k = 0; k < m.terminals().size(); ++k) {
    std::size_t leaf = m.terminals()[k];
    LinearExpr e;
    dot(e, tree.holder[k], m.prices(leaf), 1);
    if (agent == Agent::seller)
      lp.add_constraint("replicate[" + m.vertex(leaf).id + "]", Relation::greater_equal, e, b.at(k));
    else
      lp.add_constraint("cover[" + m.vertex(leaf).id + "]", Relation::greater_equal, e, -b.at(k));
  }
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    for (std::size_t atom : node.atoms) {
      LinearExpr e;
      dot(e, i, m.prices(atom), 1);
      dot(e, *node.parent, m.prices(atom), -1);
      lp.add_constraint("rebalance[" + node.name + "@" + m.vertex(atom).id + "]", Relation::equal, e, 0);
    }
  }
  return lp;
}

inline LinearProgram build_seller_delayed_lp(const Market& m, const DelayedView& g, const Claim& b) {
  return build_hedging_lp(m, &g, b, Agent::seller, Information::delayed);
}

inline LinearProgram build_buyer_delayed_lp(const Market& m, const DelayedView& g, const Claim& b) {
  return build_hedging_lp(m, &g, b, Agent::buyer, Information::delayed);
}

inline LinearProgram build_seller_full_lp(const Market& m, const Claim& b) {
  return build_hedging_lp(m, nullptr, b, Agent::seller, Information::full);
}

inline LinearProgram build_buyer_full_lp(const Market& m, const Claim& b) {
  return build_hedging_lp(m, nullptr, b, Agent::buyer, Information::full);
}

template <class S>
struct QuoteResult {
  Status status = Status::infeasible;
  std::optional<PriceQuote<S>> quote;
};

/// Solves the hedging LP and reads the price and portfolios off the optimum.
template <class S = Rational>
QuoteResult<S> solve_quote(const Market& m, const DelayedView& g, const Claim& b, Agent agent, Information info,
                           const SolveOptions& opts = {}) {
  auto lp = build_hedging_lp(m, &g, b, agent, info);
  auto sol = solve<S>(lp, opts);
  QuoteResult<S> res;
  res.status = sol.status;
  if (sol.status != Status::optimal) return res;
  PriceQuote<S> q;
  q.agent = agent;
  q.info = info;
  q.price = sol.value(lp, "kappa");
  for (const auto& node : detail::trading_tree(m, &g, info).nodes) {
    auto& h = q.strategy[node.name];
    for (std::size_t a = 0; a < m.asset_count(); ++a) h.push_back(sol.value(lp, detail::holding_name(node.name, a)));
  }
  res.quote = std::move(q);
  return res;
}

template <class S>
struct AuditReport {
  S max_violation{};
  std::vector<std::pair<std::string, S>> violations;  // constraint name, amount
  // Per terminal (Market::terminals() order): S_w.H - B_w for a seller,
  // S_w.H + B_w for a buyer.
  std::vector<S> terminal_surplus;

  bool passed(double tol = 0) const {
    if (Numeric<S>::sign(max_violation, tol) != 0) return false;
    for (const auto& s : terminal_surplus)
      if (Numeric<S>::sign(s, tol) < 0) return false;
    return true;
  }
};

/// Re-evaluates every constraint of the LP that generated `quote` at the
/// quoted price and strategy.
template <class S>
AuditReport<S> audit_hedge(const Market& m, const DelayedView& g, const Claim& b, const PriceQuote<S>& quote,
                           double tol = 0) {
  const auto tree = detail::trading_tree(m, &g, quote.info);
  for (const auto& node : tree.nodes) {
    auto it = quote.strategy.find(node.name);
    if (it == quote.strategy.end())
      throw ValidationError("strategy has no portfolio for trading vertex \"" + node.name +
                            "\"; it is not indexed by the " + to_string(quote.info) + " tree");
    if (it->second.size() != m.asset_count())
      throw ValidationError("portfolio at \"" + node.name + "\" has the wrong number of assets");
  }
  if (quote.strategy.size() != tree.nodes.size()) {
    for (const auto& [name, h] : quote.strategy) {
      bool known = false;
      for (const auto& node : tree.nodes) known = known || node.name == name;
      if (!known)
        throw ValidationError("strategy names \"" + name + "\", which is not a trading vertex of the " +
                              to_string(quote.info) + " tree");
    }
  }

  auto lp = build_hedging_lp(m, &g, b, quote.agent, quote.info);
  std::vector<S> x(lp.variables().size());
  x[lp.variable("kappa")] = quote.price;
  for (const auto& [name, h] : quote.strategy)
    for (std::size_t a = 0; a < h.size(); ++a) x[lp.variable(detail::holding_name(name, a))] = h[a];

  AuditReport<S> rep;
  auto ev = evaluate(lp, x, tol);
  rep.max_violation = ev.max_violation;
  rep.violations = std::move(ev.violated);
  for (std::size_t k = 0; k < m.terminals().size(); ++k) {
    std::size_t leaf = m.terminals()[k];
    const auto& h = quote.strategy.at(tree.nodes[tree.holder[k]].name);
    S value{};
    for (std::size_t a = 0; a < h.size(); ++a) value += Numeric<S>::from(m.prices(leaf)[a]) * h[a];
    S claim = Numeric<S>::from(b.at(k));
    rep.terminal_surplus.push_back(quote.agent == Agent::seller ? S(value - claim) : S(value + claim));
  }
  return rep;
}

}  // namespace dip
