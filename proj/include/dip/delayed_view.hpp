#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dip/market.hpp"

namespace dip {

/// Vertex of the seller's information tree G, where G_0 is trivial,
/// G_t = F_{t-1} for 1 <= t <= T-1 and G_T = F_T.
struct GVertex {
  std::string id;
  int time = 0;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  // F-vertex carrying the same information block: the F-root at times 0 and
  // 1, the F-vertex at t-1 for 1 <= t <= T-1, the terminal itself at T.
  std::size_t f_ref = 0;
};

class DelayedView {
 public:
  const std::vector<GVertex>& vertices() const { return vertices_; }
  const GVertex& vertex(std::size_t i) const { return vertices_.at(i); }
  const std::vector<std::size_t>& at_time(int t) const { return by_time_.at(t); }
  int horizon() const { return static_cast<int>(by_time_.size()) - 1; }
  std::size_t root() const { return by_time_.front().front(); }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown G-vertex \"" + id + "\"");
    return it->second;
  }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  /// G-vertex at time t whose block is the F-vertex f (1 <= t <= T-1).
  std::size_t block_at(int t, std::size_t f) const { return block_.at({t, f}); }

  /// G-vertex at time T-1 holding the final portfolio for terminal F-vertex v.
  std::size_t final_holder(const Market& m, std::size_t terminal) const {
    auto grand = *m.vertex(*m.vertex(terminal).parent).parent;
    return block_at(horizon() - 1, grand);
  }

  /// Price vector observed at a G-vertex: that of its referenced F-vertex.
  const std::vector<Rational>& prices(const Market& m, std::size_t g) const {
    return m.prices(vertices_.at(g).f_ref);
  }

  /// F-atoms at which a portfolio held at G-vertex g (1 <= t <= T-1) must be
  /// self-financing: the time-t F-vertices inside g's information block.
  const std::vector<std::size_t>& rebalancing_atoms(const Market& m, std::size_t g) const {
    return m.vertex(vertices_.at(g).f_ref).children;
  }

  friend DelayedView derive_delayed_view(const Market& m);

 private:
  std::vector<GVertex> vertices_;
  std::vector<std::vector<std::size_t>> by_time_;
  std::map<std::string, std::size_t> index_;
  std::map<std::pair<int, std::size_t>, std::size_t> block_;
};

inline DelayedView derive_delayed_view(const Market& m) {
  const int T = m.horizon();
  DelayedView g;
  g.by_time_.assign(T + 1, {});

  auto add = [&](int t, std::size_t f, std::optional<std::size_t> parent) {
    std::size_t idx = g.vertices_.size();
    GVertex gv{"G" + std::to_string(t) + ":" + m.vertex(f).id, t, parent, {}, f};
    g.index_.emplace(gv.id, idx);
    g.vertices_.push_back(std::move(gv));
    if (parent) g.vertices_[*parent].children.push_back(idx);
    g.by_time_[t].push_back(idx);
    return idx;
  };

  std::size_t root = add(0, m.root(), std::nullopt);
  for (int t = 1; t <= T - 1; ++t) {
    for (std::size_t f : m.at_time(t - 1)) {
      std::optional<std::size_t> parent =
          t == 1 ? root : g.block_.at({t - 1, *m.vertex(f).parent});
      g.block_[{t, f}] = add(t, f, parent);
    }
  }
  // Between T-1 and T the tree skips an F-level: the children of a G-vertex
  // at T-1 (block = F-vertex at T-2) are that vertex's grandchildren.
  for (std::size_t f : m.at_time(T - 2))
    for (std::size_t c : m.vertex(f).children)
      for (std::size_t leaf : m.vertex(c).children) add(T, leaf, g.block_.at({T - 1, f}));
  return g;
}

}  // namespace dip
