#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dip/delayed_view.hpp"
#include "dip/lp.hpp"
#include "dip/market.hpp"
#include "dip/primal_programs.hpp"
#include "dip/simplex.hpp"

namespace dip {

/// Which dual program a DualPoint belongs to.
///  raw:            y0, y on G-vertices at times 2..T-1, w on F-vertices at
///                  T-1, z on terminals (T >= 4).
///  measure:        y on F-vertices at times 1..T-2 (T >= 4) or 1..T-1
///                  (T in {2,3}), z read as a probability q on terminals.
///  exact_measure:  y on F-vertices at times 1..T-1 for every T; the LP dual
///                  of the delayed seller program written on the F-tree.
enum class DualForm { raw, measure, exact_measure };

inline const char* to_string(DualForm f) {
  switch (f) {
    case DualForm::raw: return "raw";
    case DualForm::measure: return "measure";
    case DualForm::exact_measure: return "exact_measure";
  }
  return "?";
}

struct DualPoint {
  DualForm form = DualForm::measure;
  Rational y0 = 1;
  std::map<std::string, Rational> y;
  std::map<VertexId, Rational> w;
  std::map<VertexId, Rational> z;
};

namespace detail {

inline std::string comp(const std::string& family, const std::string& at, std::size_t k) {
  return family + "[" + at + "][" + std::to_string(k) + "]";
}

/// Deepest F-level carrying a y variable in the measure forms.
inline int measure_depth(const Market& m, DualForm form) {
  if (form == DualForm::exact_measure || m.horizon() < 4) return m.horizon() - 1;
  return m.horizon() - 2;
}

/// Measure-form dual with y on F-levels 1..depth:
///   sum q = 1
///   S_0 = sum_{u in C(0)} y_u S_u
///   sum_{u in C(v)} (y_u S_u - sum_{mu in C(u)} y_mu S_mu) = 0   v at 0..depth-2
///   sum_{u in C(v)} y_u S_u = sum_{terminals w below v} q_w S_w     v at depth-1
/// Every vector equation is expanded per asset.
inline LinearProgram measure_dual(const Market& m, const Claim& b, Sense sense, int depth) {
  const std::size_t assets = m.asset_count();
  LinearProgram lp(sense);
  std::map<std::size_t, std::size_t> yv;
  for (int t = 1; t <= depth; ++t)
    for (std::size_t v : m.at_time(t)) yv[v] = lp.add_variable("y[" + m.vertex(v).id + "]", VarSign::free);
  std::vector<std::size_t> qv;
  for (std::size_t k = 0; k < m.terminals().size(); ++k) {
    qv.push_back(lp.add_variable("q[" + m.vertex(m.terminals()[k]).id + "]", VarSign::nonnegative));
    lp.set_objective(qv.back(), b.at(k));
  }

  {
    LinearExpr e;
    for (std::size_t q : qv) e.add(q, 1);
    lp.add_constraint("mass", Relation::equal, e, 1);
  }
  const auto& root = m.vertex(m.root());
  for (std::size_t a = 0; a < assets; ++a) {
    LinearExpr e;
    for (std::size_t u : root.children) e.add(yv.at(u), m.prices(u)[a]);
    lp.add_nontrivial(comp("root", root.id, a), Relation::equal, e, m.prices(m.root())[a]);
  }
  for (int t = 0; t <= depth - 2; ++t)
    for (std::size_t v : m.at_time(t))
      for (std::size_t a = 0; a < assets; ++a) {
        LinearExpr e;
        for (std::size_t u : m.vertex(v).children) {
          e.add(yv.at(u), m.prices(u)[a]);
          for (std::size_t mu : m.vertex(u).children) e.add(yv.at(mu), -m.prices(mu)[a]);
        }
        lp.add_nontrivial(comp("interior", m.vertex(v).id, a), Relation::equal, e, 0);
      }
  for (std::size_t v : m.at_time(depth - 1))
    for (std::size_t a = 0; a < assets; ++a) {
      LinearExpr e;
      for (std::size_t u : m.vertex(v).children) e.add(yv.at(u), m.prices(u)[a]);
      for (std::size_t k : m.terminal_descendants(v)) e.add(qv[k], -m.prices(m.terminals()[k])[a]);
      lp.add_nontrivial(comp("final", m.vertex(v).id, a), Relation::equal, e, 0);
    }
  return lp;
}

}  // namespace detail

/// Dual of the delayed seller program as obtained from the Lagrangian,
/// before eliminating w (T >= 4):
///   max sum z_w B_w  over y0, y, w free, z >= 0
///   y0 = 1
///   y0 S_0 = sum_{u in C_G(g1)} y_u S_u
///   sum_{u in C_G(v)} (y_u S_u - sum_{mu in C_G(u)} y_mu S_mu) = 0       v in G_t, 1 <= t <= T-3
///   sum_{u in C_G(v)} (y_u S_u - sum_{mu in C_F(u)} w_mu S_mu) = 0       v in G_{T-2}
///   sum_{u in C_F(v)} w_u S_u = sum_{u in C_G(v)} z_u S_u                v in G_{T-1}
inline LinearProgram build_dual_raw(const Market& m, const DelayedView& g, const Claim& b) {
  const int T = m.horizon();
  if (T < 4) throw ValidationError("the raw dual is defined for T >= 4");
  const std::size_t assets = m.asset_count();
  LinearProgram lp(Sense::maximize);

  std::size_t y0 = lp.add_variable("y0", VarSign::free);
  std::map<std::size_t, std::size_t> yv;  // G-vertex -> variable
  for (int t = 2; t <= T - 1; ++t)
    for (std::size_t v : g.at_time(t)) yv[v] = lp.add_variable("y[" + g.vertex(v).id + "]", VarSign::free);
  std::map<std::size_t, std::size_t> wv;  // F-vertex -> variable
  for (std::size_t f : m.at_time(T - 1)) wv[f] = lp.add_variable("w[" + m.vertex(f).id + "]", VarSign::free);
  std::map<std::size_t, std::size_t> zv;  // F-terminal -> variable
  for (std::size_t k = 0; k < m.terminals().size(); ++k) {
    std::size_t leaf = m.terminals()[k];
    zv[leaf] = lp.add_variable("z[" + m.vertex(leaf).id + "]", VarSign::nonnegative);
    lp.set_objective(zv[leaf], b.at(k));
  }
  auto price = [&](std::size_t gvertex, std::size_t a) -> const Rational& { return g.prices(m, gvertex)[a]; };

  lp.add_constraint("normalization", Relation::equal, LinearExpr().add(y0, 1), 1);
  const std::size_t g1 = g.at_time(1).front();
  for (std::size_t a = 0; a < assets; ++a) {
    LinearExpr e;
    e.add(y0, m.prices(m.root())[a]);
    for (std::size_t u : g.vertex(g1).children) e.add(yv.at(u), -price(u, a));
    lp.add_nontrivial(detail::comp("root", g.vertex(g1).id, a), Relation::equal, e, 0);
  }
  for (int t = 1; t <= T - 3; ++t)
    for (std::size_t v : g.at_time(t))
      for (std::size_t a = 0; a < assets; ++a) {
        LinearExpr e;
        for (std::size_t u : g.vertex(v).children) {
          e.add(yv.at(u), price(u, a));
          for (std::size_t mu : g.vertex(u).children) e.add(yv.at(mu), -price(mu, a));
        }
        lp.add_nontrivial(detail::comp("interior", g.vertex(v).id, a), Relation::equal, e, 0);
      }
  for (std::size_t v : g.at_time(T - 2))
    for (std::size_t a = 0; a < assets; ++a) {
      LinearExpr e;
      for (std::size_t u : g.vertex(v).children) {
        e.add(yv.at(u), price(u, a));
        for (std::size_t mu : m.vertex(g.vertex(u).f_ref).children) e.add(wv.at(mu), -m.prices(mu)[a]);
      }
      lp.add_nontrivial(detail::comp("penultimate", g.vertex(v).id, a), Relation::equal, e, 0);
    }
  for (std::size_t v : g.at_time(T - 1))
    for (std::size_t a = 0; a < assets; ++a) {
      LinearExpr e;
      for (std::size_t u : m.vertex(g.vertex(v).f_ref).children) e.add(wv.at(u), m.prices(u)[a]);
      for (std::size_t leaf : g.vertex(v).children) e.add(zv.at(g.vertex(leaf).f_ref), -price(leaf, a));
      lp.add_nontrivial(detail::comp("final", g.vertex(v).id, a), Relation::equal, e, 0);
    }
  return lp;
}

/// Measure form of the delayed seller's dual: optimize E_Q[B] over
/// probability vectors q and free y. For T >= 4 this is the three-family form
/// obtained by eliminating w from the raw dual (y on F-levels 1..T-2). For
/// T in {2,3} the elimination does not apply and the LP dual of the delayed
/// program itself is used (y on levels 1..T-1). `sense` = maximize gives the
/// seller's value, minimize the buyer's.
inline LinearProgram build_measure_dual(const Market& m, const Claim& b, Sense sense = Sense::maximize) {
  return detail::measure_dual(m, b, sense, detail::measure_depth(m, DualForm::measure));
}

/// Measure form that keeps the T-1 level, i.e. the LP dual of the delayed
/// program written on the F-tree, for any T >= 2.
inline LinearProgram build_exact_measure_dual(const Market& m, const Claim& b, Sense sense = Sense::maximize) {
  return detail::measure_dual(m, b, sense, m.horizon() - 1);
}

/// The program a DualPoint is checked against (claim-independent feasible set).
inline LinearProgram dual_program_for(const Market& m, DualForm form) {
  auto zero = Claim::constant(m, 0);
  switch (form) {
    case DualForm::raw: return build_dual_raw(m, derive_delayed_view(m), zero);
    case DualForm::measure: return build_measure_dual(m, zero);
    case DualForm::exact_measure: return build_exact_measure_dual(m, zero);
  }
  return build_measure_dual(m, zero);
}

/// Variable assignment of `p` for `lp` (built by dual_program_for).
inline std::vector<Rational> dual_assignment(const LinearProgram& lp, const DualPoint& p) {
  std::vector<Rational> x(lp.variables().size());
  auto put = [&](const std::string& name, const Rational& v) {
    if (!lp.has_variable(name)) throw ValidationError("dual point names unknown variable \"" + name + "\"");
    x[lp.variable(name)] = v;
  };
  const char* zname = p.form == DualForm::raw ? "z[" : "q[";
  if (p.form == DualForm::raw) put("y0", p.y0);
  for (const auto& [id, v] : p.y) put("y[" + id + "]", v);
  for (const auto& [id, v] : p.w) put("w[" + id + "]", v);
  for (const auto& [id, v] : p.z) put(zname + id + "]", v);
  return x;
}

struct DualCheck {
  bool feasible = false;
  std::string violated;  // first violated row or sign restriction
  Rational max_violation;
};

inline DualCheck check_dual_feasibility(const Market& m, const DualPoint& p) {
  auto lp = dual_program_for(m, p.form);
  auto ev = evaluate(lp, dual_assignment(lp, p));
  DualCheck c;
  c.max_violation = ev.max_violation;
  c.feasible = ev.violated.empty();
  if (!c.feasible) c.violated = ev.violated.front().first;
  return c;
}

struct MassIdentityResult {
  bool holds = false;
  std::string violated;
  explicit operator bool() const { return holds; }
};

/// Checks that the level sums  sum_{v in N_t} y_v S_v  agree at every level
/// down to  sum_w z_w S_w, and equal y0 S_0 with total z-mass y0 = 1. The
/// point must first be feasible for its dual program; otherwise the first
/// violated equation is reported.
inline MassIdentityResult check_mass_identity(const Market& m, const DualPoint& p) {
  MassIdentityResult res;
  auto feas = check_dual_feasibility(m, p);
  if (!feas.feasible) {
    res.violated = "infeasible: " + feas.violated;
    return res;
  }
  const int T = m.horizon();
  const std::size_t assets = m.asset_count();
  std::map<int, std::vector<Rational>> level;
  auto accumulate = [&](int t, const std::vector<Rational>& s, const Rational& weight) {
    auto& sum = level[t];
    if (sum.empty()) sum.assign(assets, Rational(0));
    for (std::size_t a = 0; a < assets; ++a) sum[a] += weight * s[a];
  };
  if (p.form == DualForm::raw) {
    auto g = derive_delayed_view(m);
    for (const auto& [id, v] : p.y) {
      const auto& gv = g.vertex(g.index_of(id));
      accumulate(gv.time - 1, m.prices(gv.f_ref), v);
    }
    for (const auto& [id, v] : p.w) accumulate(T - 1, m.prices(m.index_of(id)), v);
  } else {
    for (const auto& [id, v] : p.y) {
      auto f = m.index_of(id);
      accumulate(m.vertex(f).time, m.prices(f), v);
    }
  }
  Rational mass = 0;
  for (const auto& [id, v] : p.z) {
    accumulate(T, m.prices(m.index_of(id)), v);
    mass += v;
  }
  std::vector<Rational> start(assets);
  for (std::size_t a = 0; a < assets; ++a) start[a] = p.y0 * m.prices(m.root())[a];
  for (const auto& [t, sum] : level)
    if (sum != start) {
      res.violated = "level " + std::to_string(t) + " sum differs from y0 S_0";
      return res;
    }
  if (mass != p.y0 || p.y0 != 1) {
    res.violated = "terminal mass " + to_string(mass) + " with y0 = " + to_string(p.y0);
    return res;
  }
  res.holds = true;
  return res;
}

/// Reads the LP multipliers of an optimal delayed seller solve as a dual
/// point. The Lagrangian of the seller program attaches y0 to S_0.H_0 - k <= 0
/// and y to S_a.(H_v - H_parent) = 0, so y0 and y are the negated shadow
/// prices while z are the shadow prices of the replication rows.
/// form = raw (T >= 4) or exact_measure.
inline DualPoint dual_point_from_seller_solution(const Market& m, const DelayedView& g, const LinearProgram& lp,
                                                 const Solution<Rational>& sol, DualForm form) {
  if (sol.status != Status::optimal) throw ValidationError("dual point needs an optimal solution");
  if (form == DualForm::measure) throw ValidationError("use raw or exact_measure for recovered multipliers");
  if (form == DualForm::raw && m.horizon() < 4) throw ValidationError("the raw dual is defined for T >= 4");
  const int T = m.horizon();
  DualPoint p;
  p.form = form;
  p.y0 = -sol.dual(lp, "budget");
  for (std::size_t leaf : m.terminals())
    p.z[m.vertex(leaf).id] = sol.dual(lp, "replicate[" + m.vertex(leaf).id + "]");
  for (std::size_t gi = 0; gi < g.vertices().size(); ++gi) {
    const auto& gv = g.vertex(gi);
    if (gv.time < 1 || gv.time > T - 1) continue;
    for (std::size_t atom : g.rebalancing_atoms(m, gi)) {
      Rational y = -sol.dual(lp, "rebalance[" + gv.id + "@" + m.vertex(atom).id + "]");
      if (form == DualForm::exact_measure)
        p.y[m.vertex(atom).id] = y;
      else if (gv.time <= T - 2)
        p.y[g.vertex(g.block_at(gv.time + 1, atom)).id] = y;
      else
        p.w[m.vertex(atom).id] = y;
    }
  }
  return p;
}

/// Dual point given by an optimal solution of a measure-form LP.
inline DualPoint dual_point_from_measure_solution(const Market& m, const LinearProgram& lp,
                                                  const Solution<Rational>& sol, DualForm form) {
  DualPoint p;
  p.form = form;
  for (std::size_t j = 0; j < lp.variables().size(); ++j) {
    const auto& name = lp.variables()[j].name;
    auto id = name.substr(2, name.size() - 3);
    if (name[0] == 'y') p.y[id] = sol.primal[j];
    if (name[0] == 'q') p.z[id] = sol.primal[j];
  }
  (void)m;
  return p;
}

template <class S>
struct GapReport {
  Status primal_status = Status::infeasible;
  Status dual_status = Status::infeasible;
  std::optional<S> p_tilde;    // delayed seller price
  std::optional<S> d_tilde;    // measure-form dual optimum
  std::optional<S> gap;        // p_tilde - d_tilde
  std::optional<S> exact_dual; // LP dual before eliminating w (raw form when T >= 4)

  bool zero_gap(double rel_tol = 0) const {
    if (!gap) return false;
    if (Numeric<S>::exact) return Numeric<S>::sign(*gap, 0) == 0;
    double scale = std::max({1.0, std::abs(Numeric<S>::as_double(*p_tilde)), std::abs(Numeric<S>::as_double(*d_tilde))});
    return std::abs(Numeric<S>::as_double(*gap)) <= rel_tol * scale;
  }
};

/// Solves the delayed seller program and its measure-form dual and reports
/// both optima and their difference.
template <class S = Rational>
GapReport<S> verify_no_gap(const Market& m, const DelayedView& g, const Claim& b, const SolveOptions& opts = {}) {
  GapReport<S> rep;
  auto primal = solve<S>(build_seller_delayed_lp(m, g, b), opts);
  auto dual = solve<S>(build_measure_dual(m, b), opts);
  rep.primal_status = primal.status;
  rep.dual_status = dual.status;
  if (primal.status == Status::optimal) rep.p_tilde = primal.objective;
  if (dual.status == Status::optimal) rep.d_tilde = dual.objective;
  if (rep.p_tilde && rep.d_tilde) rep.gap = S(*rep.p_tilde - *rep.d_tilde);
  auto exact = m.horizon() >= 4 ? solve<S>(build_dual_raw(m, g, b), opts)
                                : solve<S>(build_exact_measure_dual(m, b), opts);
  if (exact.status == Status::optimal) rep.exact_dual = exact.objective;
  return rep;
}

}  // namespace dip
