#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dip/scalar.hpp"

namespace dip {

using VertexId = std::string;

/// Raised when a market or claim document violates a structural invariant.
/// The message names the offending vertex where there is one.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VertexSpec {
  VertexId id;
  int time = 0;
  std::optional<VertexId> parent;
  std::vector<Rational> prices;
};

struct Vertex {
  VertexId id;
  int time = 0;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  std::vector<Rational> prices;
};

/// Scenario tree of the price filtration F. Asset 0 is the numeraire, so its
/// price is 1 everywhere. Immutable once created.
class Market {
 public:
  static Market create(std::vector<std::string> assets, int horizon,
                       const std::vector<VertexSpec>& vertices,
                       std::optional<std::map<VertexId, Rational>> probs = std::nullopt);

  const std::vector<std::string>& assets() const { return assets_; }
  std::size_t asset_count() const { return assets_.size(); }
  int horizon() const { return horizon_; }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t i) const { return vertices_.at(i); }
  std::size_t root() const { return by_time_.front().front(); }
  const std::vector<std::size_t>& at_time(int t) const { return by_time_.at(t); }
  const std::vector<std::size_t>& terminals() const { return by_time_.back(); }
  std::size_t index_of(const VertexId& id) const;
  bool contains(const VertexId& id) const { return index_.count(id) != 0; }

  /// Position of a terminal vertex inside terminals().
  std::size_t terminal_position(std::size_t vertex) const { return terminal_pos_.at(vertex); }

  /// Terminal positions (into terminals()) below a vertex, in tree order.
  const std::vector<std::size_t>& terminal_descendants(std::size_t v) const {
    return descendants_.at(v);
  }

  const std::vector<Rational>& prices(std::size_t v) const { return vertices_.at(v).prices; }

  bool has_probabilities() const { return probs_.has_value(); }
  /// Terminal probabilities aligned with terminals().
  const std::vector<Rational>& terminal_probabilities() const;

 private:
  Market() = default;

  std::vector<std::string> assets_;
  int horizon_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<std::vector<std::size_t>> by_time_;
  std::unordered_map<VertexId, std::size_t> index_;
  std::unordered_map<std::size_t, std::size_t> terminal_pos_;
  std::vector<std::vector<std::size_t>> descendants_;
  std::optional<std::vector<Rational>> probs_;
};

/// Non-negative payoff, one value per terminal vertex (aligned with
/// Market::terminals()).
class Claim {
 public:
  static Claim create(const Market& m, const std::map<VertexId, Rational>& values);
  static Claim from_values(const Market& m, std::vector<Rational> values);
  static Claim constant(const Market& m, const Rational& c) {
    return from_values(m, std::vector<Rational>(m.terminals().size(), c));
  }

  const std::vector<Rational>& values() const { return values_; }
  const Rational& at(std::size_t terminal_position) const { return values_.at(terminal_position); }

 private:
  std::vector<Rational> values_;
};

// ---------------------------------------------------------------------------

inline std::size_t Market::index_of(const VertexId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown vertex \"" + id + "\"");
  return it->second;
}

inline const std::vector<Rational>& Market::terminal_probabilities() const {
  if (!probs_) throw ValidationError("market carries no terminal probabilities");
  return *probs_;
}

inline Market Market::create(std::vector<std::string> assets, int horizon,
                             const std::vector<VertexSpec>& specs,
                             std::optional<std::map<VertexId, Rational>> probs) {
  if (assets.empty()) throw ValidationError("at least one asset (the numeraire) is required");
  {
    std::set<std::string> seen;
    for (const auto& a : assets)
      if (!seen.insert(a).second) throw ValidationError("duplicate asset name \"" + a + "\"");
  }
  if (horizon < 2) throw ValidationError("horizon T must be at least 2");

  Market m;
  m.assets_ = std::move(assets);
  m.horizon_ = horizon;
  m.vertices_.reserve(specs.size());
  for (const auto& s : specs) {
    if (s.id.empty()) throw ValidationError("vertex id must be non-empty");
    if (!m.index_.emplace(s.id, m.vertices_.size()).second)
      throw ValidationError("duplicate vertex id \"" + s.id + "\"");
    if (s.time < 0 || s.time > horizon)
      throw ValidationError("vertex \"" + s.id + "\" has time outside 0..T");
    if (s.prices.size() != m.assets_.size())
      throw ValidationError("vertex \"" + s.id + "\" has " + std::to_string(s.prices.size()) +
                            " prices, expected " + std::to_string(m.assets_.size()));
    if (s.prices.front() != 1)
      throw ValidationError("numeraire price must be 1 at vertex \"" + s.id + "\"");
    m.vertices_.push_back(Vertex{s.id, s.time, std::nullopt, {}, s.prices});
  }

  m.by_time_.assign(horizon + 1, {});
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    auto& v = m.vertices_[i];
    if (s.time == 0) {
      if (s.parent) throw ValidationError("time-0 vertex \"" + s.id + "\" must not have a parent");
    } else {
      if (!s.parent) throw ValidationError("vertex \"" + s.id + "\" has no parent");
      auto it = m.index_.find(*s.parent);
      if (it == m.index_.end())
        throw ValidationError("vertex \"" + s.id + "\" has unknown parent \"" + *s.parent + "\"");
      if (m.vertices_[it->second].time != s.time - 1)
        throw ValidationError("parent of vertex \"" + s.id + "\" is not one time step earlier");
      v.parent = it->second;
      m.vertices_[it->second].children.push_back(i);
    }
    m.by_time_[s.time].push_back(i);
  }
  if (m.by_time_[0].size() != 1)
    throw ValidationError("exactly one vertex at time 0 is required, found " +
                          std::to_string(m.by_time_[0].size()));
  for (const auto& v : m.vertices_)
    if (v.time < horizon && v.children.empty())
      throw ValidationError("non-terminal vertex \"" + v.id + "\" has no children");

  const auto& terms = m.by_time_.back();
  for (std::size_t k = 0; k < terms.size(); ++k) m.terminal_pos_.emplace(terms[k], k);

  // Terminal descendants, filled bottom-up so each list follows tree order.
  m.descendants_.assign(m.vertices_.size(), {});
  for (std::size_t k = 0; k < terms.size(); ++k) m.descendants_[terms[k]] = {k};
  for (int t = horizon - 1; t >= 0; --t)
    for (std::size_t v : m.by_time_[t])
      for (std::size_t c : m.vertices_[v].children) {
        auto& d = m.descendants_[v];
        d.insert(d.end(), m.descendants_[c].begin(), m.descendants_[c].end());
      }

  if (probs) {
    std::vector<Rational> p(terms.size());
    std::vector<bool> seen(terms.size(), false);
    for (const auto& [id, value] : *probs) {
      auto it = m.index_.find(id);
      if (it == m.index_.end() || m.vertices_[it->second].time != horizon)
        throw ValidationError("probability given for non-terminal or unknown vertex \"" + id + "\"");
      if (value <= 0)
        throw ValidationError("terminal probability must be positive at vertex \"" + id + "\"");
      auto k = m.terminal_pos_.at(it->second);
      p[k] = value;
      seen[k] = true;
    }
    Rational total = 0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (!seen[k])
        throw ValidationError("missing probability for terminal vertex \"" +
                              m.vertices_[terms[k]].id + "\"");
      total += p[k];
    }
    if (total != 1) throw ValidationError("terminal probabilities sum to " + to_string(total) + ", not 1");
    m.probs_ = std::move(p);
  }
  return m;
}

inline Claim Claim::from_values(const Market& m, std::vector<Rational> values) {
  if (values.size() != m.terminals().size())
    throw ValidationError("claim must have one value per terminal vertex");
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] < 0)
      throw ValidationError("claim value must be non-negative at vertex \"" +
                            m.vertex(m.terminals()[k]).id + "\"");
  Claim c;
  c.values_ = std::move(values);
  return c;
}

inline Claim Claim::create(const Market& m, const std::map<VertexId, Rational>& values) {
  std::vector<Rational> v(m.terminals().size());
  std::vector<bool> seen(v.size(), false);
  for (const auto& [id, value] : values) {
    if (!m.contains(id) || m.vertex(m.index_of(id)).time != m.horizon())
      throw ValidationError("claim value given for non-terminal or unknown vertex \"" + id + "\"");
    auto k = m.terminal_position(m.index_of(id));
    v[k] = value;
    seen[k] = true;
  }
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!seen[k])
      throw ValidationError("claim is undefined at terminal vertex \"" +
                            m.vertex(m.terminals()[k]).id + "\"");
  return from_values(m, std::move(v));
}

// --- derived quantities ------------------------------------------------------

/// Probability of reaching each vertex (indexed like Market::vertices()),
/// summed backwards from the terminal probabilities.
inline std::vector<Rational> vertex_probabilities(const Market& m) {
  const auto& tp = m.terminal_probabilities();
  std::vector<Rational> p(m.vertices().size());
  for (std::size_t k = 0; k < m.terminals().size(); ++k) p[m.terminals()[k]] = tp[k];
  for (int t = m.horizon() - 1; t >= 0; --t)
    for (std::size_t v : m.at_time(t))
      for (std::size_t c : m.vertex(v).children) p[v] += p[c];
  return p;
}

/// Information partition of the scenario space at time t: one block of
/// terminal ids per time-t vertex.
inline std::vector<std::vector<VertexId>> information_partition(const Market& m, int t) {
  std::vector<std::vector<VertexId>> blocks;
  for (std::size_t v : m.at_time(t)) {
    auto& block = blocks.emplace_back();
    for (std::size_t k : m.terminal_descendants(v)) block.push_back(m.vertex(m.terminals()[k]).id);
  }
  return blocks;
}

// --- JSON ingest -------------------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ValidationError("unknown key \"" + item.key() + "\" in " + where);
  }
}

inline Rational scalar_field(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError(where + ": scalars must be strings");
  try {
    return parse_scalar(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

inline nlohmann::json parse_document(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline Market market_from_json(const nlohmann::json& doc) {
  detail::reject_unknown_keys(doc, {"assets", "T", "vertices", "probs"}, "market document");
  if (!doc.contains("assets") || !doc.contains("T") || !doc.contains("vertices"))
    throw ValidationError("market document needs \"assets\", \"T\" and \"vertices\"");
  if (!doc["assets"].is_array()) throw ValidationError("\"assets\" must be an array");
  std::vector<std::string> assets;
  for (const auto& a : doc["assets"]) {
    if (!a.is_string()) throw ValidationError("asset names must be strings");
    assets.push_back(a.get<std::string>());
  }
  if (!doc["T"].is_number_integer()) throw ValidationError("\"T\" must be an integer");
  int horizon = doc["T"].get<int>();

  if (!doc["vertices"].is_array()) throw ValidationError("\"vertices\" must be an array");
  std::vector<VertexSpec> specs;
  for (const auto& jv : doc["vertices"]) {
    detail::reject_unknown_keys(jv, {"id", "time", "parent", "prices"}, "vertex record");
    VertexSpec s;
    if (!jv.contains("id") || !jv["id"].is_string()) throw ValidationError("vertex id must be a string");
    s.id = jv["id"].get<std::string>();
    if (!jv.contains("time") || !jv["time"].is_number_integer())
      throw ValidationError("vertex \"" + s.id + "\" needs an integer time");
    s.time = jv["time"].get<int>();
    if (jv.contains("parent") && !jv["parent"].is_null()) {
      if (!jv["parent"].is_string()) throw ValidationError("vertex \"" + s.id + "\": parent must be a string or null");
      s.parent = jv["parent"].get<std::string>();
    }
    if (!jv.contains("prices") || !jv["prices"].is_array())
      throw ValidationError("vertex \"" + s.id + "\" needs a prices array");
    for (const auto& p : jv["prices"]) s.prices.push_back(detail::scalar_field(p, "vertex \"" + s.id + "\""));
    specs.push_back(std::move(s));
  }

  std::optional<std::map<VertexId, Rational>> probs;
  if (doc.contains("probs")) {
    if (!doc["probs"].is_object()) throw ValidationError("\"probs\" must be an object");
    probs.emplace();
    for (const auto& item : doc["probs"].items())
      (*probs)[item.key()] = detail::scalar_field(item.value(), "probability of \"" + item.key() + "\"");
  }
  return Market::create(std::move(assets), horizon, specs, std::move(probs));
}

inline Market load_market(const std::string& text) {
  return market_from_json(detail::parse_document(text, "market document"));
}

inline Market load_market_file(const std::string& path) { return load_market(detail::read_file(path)); }

inline nlohmann::json market_to_json(const Market& m) {
  nlohmann::json doc;
  doc["assets"] = m.assets();
  doc["T"] = m.horizon();
  auto& vs = doc["vertices"] = nlohmann::json::array();
  for (const auto& v : m.vertices()) {
    nlohmann::json jv;
    jv["id"] = v.id;
    jv["time"] = v.time;
    jv["parent"] = v.parent ? nlohmann::json(m.vertex(*v.parent).id) : nlohmann::json(nullptr);
    for (const auto& p : v.prices) jv["prices"].push_back(to_string(p));
    vs.push_back(std::move(jv));
  }
  if (m.has_probabilities()) {
    auto& probs = doc["probs"] = nlohmann::json::object();
    for (std::size_t k = 0; k < m.terminals().size(); ++k)
      probs[m.vertex(m.terminals()[k]).id] = to_string(m.terminal_probabilities()[k]);
  }
  return doc;
}

inline std::string dump_market(const Market& m) { return market_to_json(m).dump(2); }

inline Claim claim_from_json(const Market& m, const nlohmann::json& doc) {
  detail::reject_unknown_keys(doc, {"claim"}, "claim document");
  if (!doc.contains("claim") || !doc["claim"].is_object())
    throw ValidationError("claim document needs a \"claim\" object");
  std::map<VertexId, Rational> values;
  for (const auto& item : doc["claim"].items())
    values[item.key()] = detail::scalar_field(item.value(), "claim value at \"" + item.key() + "\"");
  return Claim::create(m, values);
}

inline Claim load_claim(const Market& m, const std::string& text) {
  return claim_from_json(m, detail::parse_document(text, "claim document"));
}

inline Claim load_claim_file(const Market& m, const std::string& path) {
  return load_claim(m, detail::read_file(path));
}

inline nlohmann::json claim_to_json(const Market& m, const Claim& b) {
  nlohmann::json doc;
  auto& c = doc["claim"] = nlohmann::json::object();
  for (std::size_t k = 0; k < m.terminals().size(); ++k)
    c[m.vertex(m.terminals()[k]).id] = to_string(b.at(k));
  return doc;
}

}  // namespace dip
