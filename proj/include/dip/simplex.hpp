#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dip/lp.hpp"

namespace dip {

enum class Mode { exact, floating };

struct SolveOptions {
  double tolerance = 1e-9;                // floating mode only
  std::optional<std::size_t> max_pivots;  // default 10 * (rows + columns)
  bool trace = false;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Dense two-phase tableau for  min c.x  s.t.  A x = b, x >= 0, b >= 0,
/// with one artificial column per row. The artificial block keeps B^-1, which
/// is where the duals are read from. Bland's rule throughout.
template <class S>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t structural, double tol)
      : m_(rows), n_(structural), width_(structural + rows + 1), tol_(tol),
        cells_((rows + 1) * width_), basis_(rows) {
    for (std::size_t i = 0; i < m_; ++i) {
      at(i, n_ + i) = S(1);
      basis_[i] = n_ + i;
    }
  }

  S& at(std::size_t i, std::size_t j) { return cells_[i * width_ + j]; }
  const S& at(std::size_t i, std::size_t j) const { return cells_[i * width_ + j]; }
  S& rhs(std::size_t i) { return at(i, width_ - 1); }
  // Row m_ is the reduced-cost row; its rhs cell holds -objective.
  S& cost(std::size_t j) { return at(m_, j); }

  std::size_t rows() const { return m_; }
  std::size_t structural() const { return n_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void set_phase_one_costs() {
    for (std::size_t j = 0; j < width_; ++j) cost(j) = S{};
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) cost(j) -= at(i, j);
      cost(width_ - 1) -= rhs(i);
    }
  }

  void set_costs(const std::vector<S>& c) {
    for (std::size_t j = 0; j < width_; ++j) cost(j) = j < n_ ? c[j] : S{};
    S tmp{};
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t b = basis_[i];
      if (b >= n_ || Numeric<S>::sign(c[b], 0) == 0) continue;
      for (std::size_t j = 0; j < width_; ++j)
        if (Numeric<S>::sign(at(i, j), 0) != 0) Numeric<S>::sub_mul(cost(j), c[b], at(i, j), tmp);
    }
  }

  S objective() { return S(-cost(width_ - 1)); }

  void pivot(std::size_t r, std::size_t q) {
    S inv = S(1) / at(r, q);
    nz_.clear();
    for (std::size_t j = 0; j < width_; ++j) {
      S& a = at(r, j);
      if (Numeric<S>::sign(a, 0) == 0) continue;
      a *= inv;
      nz_.push_back(j);
    }
    at(r, q) = S(1);
    S factor{}, tmp{};
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      if (Numeric<S>::sign(at(i, q), 0) == 0) continue;
      factor = at(i, q);
      for (std::size_t j : nz_) {
        Numeric<S>::sub_mul(at(i, j), factor, at(r, j), tmp);
        if constexpr (!Numeric<S>::exact)
          if (Numeric<S>::abs(at(i, j)) < 1e-13) at(i, j) = S{};
      }
      at(i, q) = S{};
    }
    basis_[r] = q;
  }

  /// Bland entering column among [0, limit): lowest index with negative
  /// reduced cost.
  std::optional<std::size_t> entering(std::size_t limit) {
    for (std::size_t j = 0; j < limit; ++j)
      if (Numeric<S>::sign(cost(j), tol_) < 0) return j;
    return std::nullopt;
  }

  /// Minimum-ratio row; ties go to the lowest basic column index.
  std::optional<std::size_t> leaving(std::size_t q) {
    std::optional<std::size_t> best;
    S best_ratio{};
    for (std::size_t i = 0; i < m_; ++i) {
      if (Numeric<S>::sign(at(i, q), tol_) <= 0) continue;
      S ratio = rhs(i) / at(i, q);
      if (!best) {
        best = i;
        best_ratio = ratio;
        continue;
      }
      int cmp = Numeric<S>::sign(S(ratio - best_ratio), tol_);
      if (cmp < 0 || (cmp == 0 && basis_[i] < basis_[*best])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }

 private:
  std::size_t m_, n_, width_;
  double tol_;
  std::vector<S> cells_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
};

}  // namespace detail

/// Two-phase primal simplex with Bland's rule. Exact when S is Rational;
/// with S = double every sign test uses opts.tolerance.
template <class S = Rational>
Solution<S> solve(const LinearProgram& lp, const SolveOptions& opts = {}) {
  const double tol = Numeric<S>::exact ? 0.0 : opts.tolerance;
  const auto& vars = lp.variables();
  const auto& cons = lp.constraints();
  const bool maximize = lp.sense() == Sense::maximize;

  // Standard-form columns: x_j (or x_j+ and x_j- when free), then one slack per
  // inequality row.
  std::vector<std::size_t> pos(vars.size()), neg(vars.size(), SIZE_MAX);
  std::size_t n = 0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    pos[j] = n++;
    if (vars[j].sign == VarSign::free) neg[j] = n++;
  }
  std::vector<std::size_t> slack(cons.size(), SIZE_MAX);
  for (std::size_t r = 0; r < cons.size(); ++r)
    if (cons[r].relation != Relation::equal) slack[r] = n++;

  const std::size_t m = cons.size();
  detail::Tableau<S> tab(m, n, tol);
  std::vector<int> row_sign(m, 1);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& c = cons[r];
    row_sign[r] = c.rhs < 0 ? -1 : 1;
    const S sgn = S(row_sign[r]);
    for (const auto& t : c.terms) {
      S a = Numeric<S>::from(t.coef) * sgn;
      tab.at(r, pos[t.var]) = a;
      if (neg[t.var] != SIZE_MAX) tab.at(r, neg[t.var]) = S(-a);
    }
    if (slack[r] != SIZE_MAX) tab.at(r, slack[r]) = S(c.relation == Relation::less_equal ? 1 : -1) * sgn;
    tab.rhs(r) = Numeric<S>::from(c.rhs) * sgn;
  }

  std::vector<S> cost(n);
  const S orient = S(maximize ? -1 : 1);
  for (std::size_t j = 0; j < vars.size(); ++j) {
    S c = Numeric<S>::from(lp.objective()[j]) * orient;
    cost[pos[j]] = c;
    if (neg[j] != SIZE_MAX) cost[neg[j]] = S(-c);
  }

  Solution<S> sol;
  const std::size_t limit = opts.max_pivots.value_or(10 * (m + n));
  auto record = [&](int phase) {
    if (!opts.trace) return;
    auto b = tab.basis();
    std::sort(b.begin(), b.end());
    b.insert(b.begin(), static_cast<std::size_t>(phase));
    sol.basis_trace.push_back(std::move(b));
    if (phase == 2) sol.objective_trace.push_back(S(tab.objective() * orient));
  };
  auto step = [&](std::size_t q, std::size_t r) {
    if (++sol.pivots > limit)
      throw SolverError("simplex exceeded the pivot limit of " + std::to_string(limit));
    tab.pivot(r, q);
  };

  // Phase 1: drive the artificials to zero.
  tab.set_phase_one_costs();
  record(1);
  while (auto q = tab.entering(n)) {
    auto r = tab.leaving(*q);
    if (!r) throw SolverError("phase 1 is unbounded, which cannot happen");
    step(*q, *r);
    record(1);
  }
  if (Numeric<S>::sign(tab.objective(), tol) > 0) {
    sol.status = Status::infeasible;
    return sol;
  }
  // Pivot remaining zero-level artificials out; rows where that is impossible
  // are redundant and keep their artificial basic at zero.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (Numeric<S>::sign(tab.at(i, j), tol) != 0) {
        step(j, i);
        break;
      }
  }

  // Phase 2.
  tab.set_costs(cost);
  record(2);
  while (auto q = tab.entering(n)) {
    auto r = tab.leaving(*q);
    if (!r) {
      sol.status = Status::unbounded;
      return sol;
    }
    step(*q, *r);
    record(2);
  }

  std::vector<S> xs(n);
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis()[i] < n) xs[tab.basis()[i]] = tab.rhs(i);
  sol.status = Status::optimal;
  sol.primal.resize(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    sol.primal[j] = xs[pos[j]];
    if (neg[j] != SIZE_MAX) sol.primal[j] -= xs[neg[j]];
  }
  sol.objective = objective_value(lp, sol.primal);
  // The reduced cost of artificial column i is -(c_B B^-1)_i.
  sol.duals.resize(m);
  for (std::size_t r = 0; r < m; ++r)
    sol.duals[r] = S(-tab.cost(n + r)) * S(row_sign[r]) * orient;
  return sol;
}

inline Solution<Rational> solve_exact(const LinearProgram& lp, const SolveOptions& opts = {}) {
  return solve<Rational>(lp, opts);
}

}  // namespace dip
