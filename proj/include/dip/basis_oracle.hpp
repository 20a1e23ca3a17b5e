#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dip/lp.hpp"

namespace dip {

class OracleSizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

/// Solves the square system M z = rhs exactly; nullopt when M is singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> M,
                                                         std::vector<Rational> rhs) {
  const std::size_t k = M.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t p = col;
    while (p < k && M[p][col] == 0) ++p;
    if (p == k) return std::nullopt;
    std::swap(M[p], M[col]);
    std::swap(rhs[p], rhs[col]);
    for (std::size_t i = 0; i < k; ++i) {
      if (i == col || M[i][col] == 0) continue;
      Rational f = M[i][col] / M[col][col];
      for (std::size_t j = col; j < k; ++j) M[i][j] -= f * M[col][j];
      rhs[i] -= f * rhs[col];
    }
  }
  std::vector<Rational> z(k);
  for (std::size_t i = 0; i < k; ++i) z[i] = rhs[i] / M[i][i];
  return z;
}

}  // namespace detail

/// Brute-force reference solver: converts to  min c.x, A x = b, x >= 0,
/// drops dependent rows, then visits every basis. Shares no code with the
/// simplex path. Returns status, primal and objective (no duals).
inline Solution<Rational> enumerate_bases_oracle(const LinearProgram& lp, std::size_t max_columns = 14) {
  const auto& vars = lp.variables();
  const auto& cons = lp.constraints();
  const Rational orient = lp.sense() == Sense::maximize ? -1 : 1;

  // Column layout: one column per nonnegative variable, two per free one,
  // one per inequality.
  struct Col {
    std::size_t var;
    int sign;  // contribution to the original variable; 0 for slacks
  };
  std::vector<Col> cols;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    cols.push_back({j, 1});
    if (vars[j].sign == VarSign::free) cols.push_back({j, -1});
  }
  const std::size_t first_slack = cols.size();
  for (std::size_t r = 0; r < cons.size(); ++r)
    if (cons[r].relation != Relation::equal) cols.push_back({r, 0});
  const std::size_t n = cols.size();
  if (n > max_columns)
    throw OracleSizeError("oracle guard: " + std::to_string(n) + " standard-form columns exceed " +
                          std::to_string(max_columns));

  std::vector<std::vector<Rational>> A(cons.size(), std::vector<Rational>(n));
  std::vector<Rational> b(cons.size());
  std::vector<Rational> c(n);
  for (std::size_t k = 0; k < first_slack; ++k) c[k] = orient * lp.objective()[cols[k].var] * cols[k].sign;
  {
    std::size_t s = first_slack;
    for (std::size_t r = 0; r < cons.size(); ++r) {
      for (std::size_t k = 0; k < first_slack; ++k)
        for (const auto& t : cons[r].terms)
          if (t.var == cols[k].var) A[r][k] = t.coef * cols[k].sign;
      if (cons[r].relation != Relation::equal)
        A[r][s++] = cons[r].relation == Relation::less_equal ? 1 : -1;
      b[r] = cons[r].rhs;
    }
  }

  // Row-reduce [A | b] to an independent row set.
  std::vector<std::vector<Rational>> R;
  std::vector<Rational> rb;
  {
    auto E = A;
    auto eb = b;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < E.size(); ++col) {
      std::size_t p = row;
      while (p < E.size() && E[p][col] == 0) ++p;
      if (p == E.size()) continue;
      std::swap(E[p], E[row]);
      std::swap(eb[p], eb[row]);
      for (std::size_t i = 0; i < E.size(); ++i) {
        if (i == row || E[i][col] == 0) continue;
        Rational f = E[i][col] / E[row][col];
        for (std::size_t j = 0; j < n; ++j) E[i][j] -= f * E[row][j];
        eb[i] -= f * eb[row];
      }
      ++row;
    }
    Solution<Rational> sol;
    for (std::size_t i = row; i < E.size(); ++i)
      if (eb[i] != 0) {
        sol.status = Status::infeasible;
        return sol;
      }
    R.assign(E.begin(), E.begin() + row);
    rb.assign(eb.begin(), eb.begin() + row);
  }
  const std::size_t m = R.size();

  std::optional<std::vector<Rational>> best_x;
  Rational best_obj;
  bool ray = false;

  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  auto visit = [&]() {
    std::vector<std::vector<Rational>> B(m, std::vector<Rational>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) B[i][k] = R[i][pick[k]];
    auto xb = detail::solve_square(B, rb);
    if (!xb) return;
    for (const auto& v : *xb)
      if (v < 0) return;
    std::vector<Rational> x(n);
    Rational obj = 0;
    std::vector<bool> basic(n, false);
    for (std::size_t k = 0; k < m; ++k) {
      x[pick[k]] = (*xb)[k];
      obj += c[pick[k]] * (*xb)[k];
      basic[pick[k]] = true;
    }
    if (!best_x || obj < best_obj) {
      best_x = x;
      best_obj = obj;
    }
    // Improving ray: a nonbasic column with negative reduced cost whose basic
    // direction never decreases any basic variable.
    for (std::size_t j = 0; j < n && !ray; ++j) {
      if (basic[j]) continue;
      std::vector<Rational> col(m);
      for (std::size_t i = 0; i < m; ++i) col[i] = R[i][j];
      auto d = detail::solve_square(B, col);
      Rational reduced = c[j];
      bool bounded = false;
      for (std::size_t k = 0; k < m; ++k) {
        reduced -= c[pick[k]] * (*d)[k];
        if ((*d)[k] > 0) bounded = true;
      }
      if (reduced < 0 && !bounded) ray = true;
    }
  };

  if (m == 0) {
    pick.clear();
    visit();
  } else if (m <= n) {
    while (true) {
      visit();
      std::size_t i = m;
      while (i > 0 && pick[i - 1] == n - m + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t k = i; k < m; ++k) pick[k] = pick[k - 1] + 1;
    }
  }

  Solution<Rational> sol;
  if (!best_x) {
    sol.status = Status::infeasible;
    return sol;
  }
  if (ray) {
    sol.status = Status::unbounded;
    return sol;
  }
  sol.status = Status::optimal;
  sol.primal.assign(vars.size(), Rational(0));
  for (std::size_t k = 0; k < first_slack; ++k) sol.primal[cols[k].var] += (*best_x)[k] * cols[k].sign;
  sol.objective = objective_value(lp, sol.primal);
  return sol;
}

}  // namespace dip
