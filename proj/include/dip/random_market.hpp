#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dip/market.hpp"

namespace dip {

struct RandomMarketSpec {
  int horizon = 4;
  int min_children = 2;
  int max_children = 2;
  int min_risky = 1;
  int max_risky = 2;
};

struct RandomInstance {
  Market market;
  Claim claim;
  int risky = 0;
};

namespace detail {

// Modulo draw on the raw engine output; unlike std::uniform_int_distribution
// this is identical across standard libraries.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

}  // namespace detail

/// Random arbitrage-free market plus claim. Terminal prices are drawn first;
/// every earlier price is the conditional expectation under randomly drawn
/// transition probabilities, so that measure is an equivalent martingale
/// measure by construction. Sibling price vectors are kept distinct.
inline RandomInstance random_instance(std::uint64_t seed, const RandomMarketSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  const int T = spec.horizon;
  const int risky = static_cast<int>(detail::draw(rng, spec.min_risky, spec.max_risky));
  const std::size_t assets = risky + 1;

  struct Node {
    std::string id;
    int time;
    int parent;
    std::vector<int> children;
    std::vector<Rational> weight;  // transition probabilities to children
    std::vector<Rational> prices;
  };
  std::vector<Node> nodes{{"r", 0, -1, {}, {}, {}}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].time == T) continue;
    int c = static_cast<int>(detail::draw(rng, spec.min_children, spec.max_children));
    for (int k = 0; k < c; ++k) {
      nodes[i].children.push_back(static_cast<int>(nodes.size()));
      nodes.push_back({nodes[i].id + std::to_string(k), nodes[i].time + 1, static_cast<int>(i), {}, {}, {}});
    }
  }

  for (;;) {
    for (auto& n : nodes) {
      n.prices.assign(assets, Rational(1));
      if (n.children.empty()) {
        for (std::size_t a = 1; a < assets; ++a) n.prices[a] = Rational(static_cast<long>(detail::draw(rng, 1, 12)));
      } else {
        std::vector<long> w;
        long total = 0;
        for (std::size_t k = 0; k < n.children.size(); ++k) total += w.emplace_back(detail::draw(rng, 1, 4));
        n.weight.clear();
        for (long x : w) n.weight.push_back(Rational(x, total));
        for (auto& x : n.weight) x.canonicalize();
      }
    }
    for (std::size_t i = nodes.size(); i-- > 0;) {
      auto& n = nodes[i];
      if (n.children.empty()) continue;
      for (std::size_t a = 1; a < assets; ++a) {
        Rational s = 0;
        for (std::size_t k = 0; k < n.children.size(); ++k) s += n.weight[k] * nodes[n.children[k]].prices[a];
        n.prices[a] = s;
      }
    }
    bool distinct = true;
    for (const auto& n : nodes)
      for (std::size_t i = 0; i < n.children.size(); ++i)
        for (std::size_t j = i + 1; j < n.children.size(); ++j)
          distinct = distinct && nodes[n.children[i]].prices != nodes[n.children[j]].prices;
    if (distinct) break;
  }

  std::vector<std::string> names{"bond"};
  for (int a = 1; a <= risky; ++a) names.push_back("stock" + std::to_string(a));
  std::vector<VertexSpec> specs;
  std::map<VertexId, Rational> probs;
  std::size_t leaves = 0;
  for (const auto& n : nodes) leaves += n.children.empty();
  for (const auto& n : nodes) {
    std::optional<VertexId> parent;
    if (n.parent >= 0) parent = nodes[n.parent].id;
    specs.push_back({n.id, n.time, parent, n.prices});
    if (n.children.empty()) probs[n.id] = Rational(1, static_cast<unsigned long>(leaves));
  }
  auto market = Market::create(names, T, specs, probs);

  std::vector<Rational> payoff;
  for (std::size_t k = 0; k < market.terminals().size(); ++k) {
    Rational v(static_cast<long>(detail::draw(rng, 0, 12)), static_cast<unsigned long>(detail::draw(rng, 1, 3)));
    v.canonicalize();
    payoff.push_back(v);
  }
  auto claim = Claim::from_values(market, std::move(payoff));
  return {std::move(market), std::move(claim), risky};
}

}  // namespace dip
