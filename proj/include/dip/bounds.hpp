#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dip/delayed_view.hpp"
#include "dip/dual_programs.hpp"
#include "dip/lp.hpp"
#include "dip/market.hpp"
#include "dip/primal_programs.hpp"
#include "dip/simplex.hpp"

namespace dip {

/// Probability vector over terminal vertices (Market::terminals() order).
struct ProbabilityMeasure {
  std::vector<Rational> q;
};

class LiftError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

// Adds coef * Q(v) * s, where Q(v) is the q-mass below v.
inline void add_mass(LinearExpr& e, const Market& m, const std::vector<std::size_t>& qv, std::size_t v,
                     const Rational& coef) {
  for (std::size_t k : m.terminal_descendants(v)) e.add(qv[k], coef);
}

inline std::vector<std::size_t> add_measure_variables(LinearProgram& lp, const Market& m, const Claim& b) {
  std::vector<std::size_t> qv;
  LinearExpr mass;
  for (std::size_t k = 0; k < m.terminals().size(); ++k) {
    qv.push_back(lp.add_variable("q[" + m.vertex(m.terminals()[k]).id + "]", VarSign::nonnegative));
    lp.set_objective(qv.back(), b.at(k));
    mass.add(qv.back(), 1);
  }
  lp.add_constraint("mass", Relation::equal, mass, 1);
  return qv;
}

inline std::vector<Rational> vertex_masses(const Market& m, const ProbabilityMeasure& q) {
  std::vector<Rational> mass(m.vertices().size());
  for (std::size_t v = 0; v < mass.size(); ++v)
    for (std::size_t k : m.terminal_descendants(v)) mass[v] += q.q.at(k);
  return mass;
}

inline std::vector<Rational> measure_assignment(const Market& m, const ProbabilityMeasure& q) {
  if (q.q.size() != m.terminals().size()) throw LiftError("measure has the wrong number of terminal masses");
  return q.q;
}

}  // namespace detail

/// Optimizes E_Q[B] over all martingale measures of the F-filtration:
/// q >= 0, sum q = 1 and, at every non-terminal v and for every asset,
/// sum_{u in C(v)} Q(u) S_u = Q(v) S_v with Q(u) the q-mass below u.
inline LinearProgram build_martingale_lp(const Market& m, const Claim& b, Sense sense = Sense::maximize) {
  LinearProgram lp(sense);
  auto qv = detail::add_measure_variables(lp, m, b);
  for (int t = 0; t < m.horizon(); ++t)
    for (std::size_t v : m.at_time(t))
      for (std::size_t a = 0; a < m.asset_count(); ++a) {
        LinearExpr e;
        for (std::size_t u : m.vertex(v).children) detail::add_mass(e, m, qv, u, m.prices(u)[a]);
        detail::add_mass(e, m, qv, v, -m.prices(v)[a]);
        lp.add_nontrivial(detail::comp("martingale", m.vertex(v).id, a), Relation::equal, e, 0);
      }
  return lp;
}

/// The intermediate program (T >= 4):
///   S_0 = E_Q[S_1]
///   E_Q[S_{t+1} | F_t] = E_Q[S_{t+2} | F_t]      t = 0..T-4
///   E_Q[S_{T-2} | F_{T-3}] = E_Q[S_T | F_{T-3}]
/// with the conditional expectations written unnormalized per F-vertex.
inline LinearProgram build_squeeze_lp(const Market& m, const Claim& b, Sense sense = Sense::maximize) {
  const int T = m.horizon();
  if (T < 4) throw ValidationError("the intermediate bound is defined for T >= 4");
  LinearProgram lp(sense);
  auto qv = detail::add_measure_variables(lp, m, b);
  const auto& root = m.vertex(m.root());
  for (std::size_t a = 0; a < m.asset_count(); ++a) {
    LinearExpr e;
    for (std::size_t u : root.children) detail::add_mass(e, m, qv, u, m.prices(u)[a]);
    lp.add_nontrivial(detail::comp("root", root.id, a), Relation::equal, e, m.prices(m.root())[a]);
  }
  for (int t = 0; t <= T - 4; ++t)
    for (std::size_t v : m.at_time(t))
      for (std::size_t a = 0; a < m.asset_count(); ++a) {
        LinearExpr e;
        for (std::size_t u : m.vertex(v).children) {
          detail::add_mass(e, m, qv, u, m.prices(u)[a]);
          for (std::size_t mu : m.vertex(u).children) detail::add_mass(e, m, qv, mu, -m.prices(mu)[a]);
        }
        lp.add_nontrivial(detail::comp("step", m.vertex(v).id, a), Relation::equal, e, 0);
      }
  for (std::size_t v : m.at_time(T - 3))
    for (std::size_t a = 0; a < m.asset_count(); ++a) {
      LinearExpr e;
      for (std::size_t u : m.vertex(v).children) detail::add_mass(e, m, qv, u, m.prices(u)[a]);
      for (std::size_t k : m.terminal_descendants(v)) e.add(qv[k], -m.prices(m.terminals()[k])[a]);
      lp.add_nontrivial(detail::comp("final", m.vertex(v).id, a), Relation::equal, e, 0);
    }
  return lp;
}

/// Name of the first violated martingale/measure condition, or nullopt.
inline std::optional<std::string> martingale_violation(const Market& m, const ProbabilityMeasure& q) {
  auto lp = build_martingale_lp(m, Claim::constant(m, 0));
  auto ev = evaluate(lp, detail::measure_assignment(m, q));
  if (ev.violated.empty()) return std::nullopt;
  return ev.violated.front().first;
}

inline std::optional<std::string> squeeze_violation(const Market& m, const ProbabilityMeasure& q) {
  auto lp = build_squeeze_lp(m, Claim::constant(m, 0));
  auto ev = evaluate(lp, detail::measure_assignment(m, q));
  if (ev.violated.empty()) return std::nullopt;
  return ev.violated.front().first;
}

inline ProbabilityMeasure measure_from_solution(const Market& m, const LinearProgram& lp,
                                                const Solution<Rational>& sol) {
  ProbabilityMeasure q;
  for (std::size_t leaf : m.terminals()) q.q.push_back(sol.value(lp, "q[" + m.vertex(leaf).id + "]"));
  return q;
}

struct EmmResult {
  std::optional<ProbabilityMeasure> witness;
  std::string reason;  // why none exists
  explicit operator bool() const { return witness.has_value(); }
};

/// Equivalent martingale measure test: maximize each terminal mass over the
/// martingale polytope. One exists iff every maximum is positive; the average
/// of the maximizers is then strictly positive everywhere.
inline EmmResult check_emm_exists(const Market& m) {
  EmmResult res;
  const std::size_t M = m.terminals().size();
  std::vector<Rational> sum(M);
  for (std::size_t k = 0; k < M; ++k) {
    std::vector<Rational> indicator(M);
    indicator[k] = 1;
    auto lp = build_martingale_lp(m, Claim::from_values(m, indicator));
    auto sol = solve_exact(lp);
    if (sol.status != Status::optimal) {
      res.reason = "no martingale measure";
      return res;
    }
    if (sol.objective <= 0) {
      res.reason = "no martingale measure charges terminal \"" + m.vertex(m.terminals()[k]).id + "\"";
      return res;
    }
    auto q = measure_from_solution(m, lp, sol);
    for (std::size_t j = 0; j < M; ++j) sum[j] += q.q[j];
  }
  ProbabilityMeasure w;
  for (auto& s : sum) w.q.push_back(s / M);
  res.witness = std::move(w);
  return res;
}

namespace detail {

/// y_v := Q(v): at T-1 the mass of the children, then summed upwards.
inline DualPoint lift_measure(const Market& m, const ProbabilityMeasure& q, DualForm form) {
  auto mass = vertex_masses(m, q);
  DualPoint p;
  p.form = form;
  const int depth = measure_depth(m, form);
  for (int t = 1; t <= depth; ++t)
    for (std::size_t v : m.at_time(t)) p.y[m.vertex(v).id] = mass[v];
  for (std::size_t k = 0; k < m.terminals().size(); ++k) p.z[m.vertex(m.terminals()[k]).id] = q.q[k];
  return p;
}

}  // namespace detail

/// Maps a martingale measure to a feasible point of the measure-form dual.
inline DualPoint lift_emm_to_dual_point(const Market& m, const ProbabilityMeasure& q,
                                        DualForm form = DualForm::measure) {
  if (form == DualForm::raw) throw LiftError("lifts target the measure forms");
  if (auto bad = martingale_violation(m, q)) throw LiftError("not a martingale measure: violates " + *bad);
  return detail::lift_measure(m, q, form);
}

/// Same construction for a point of the intermediate program.
inline DualPoint lift_squeeze_to_dual_point(const Market& m, const ProbabilityMeasure& q) {
  if (auto bad = squeeze_violation(m, q)) throw LiftError("infeasible for the intermediate program: violates " + *bad);
  return detail::lift_measure(m, q, DualForm::measure);
}

// --- price report ------------------------------------------------------------

struct Check {
  std::string name;
  bool passed = false;
};

enum class Outcome { priced, arbitrage, solver_failure };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::priced: return "priced";
    case Outcome::arbitrage: return "arbitrage";
    case Outcome::solver_failure: return "solver_failure";
  }
  return "?";
}

template <class S>
struct PriceReport {
  Outcome outcome = Outcome::priced;
  std::string message;

  std::optional<S> p_tilde;             // delayed seller, primal
  std::optional<S> d_tilde;             // measure-form dual, sup
  std::optional<S> exact_dual;          // dual before eliminating w
  std::optional<S> alpha;               // sup over martingale measures
  std::optional<S> beta;                // intermediate program (T >= 4)
  std::optional<S> seller_full;         // full-information seller, primal
  std::optional<S> buyer_delayed;       // delayed buyer, primal
  std::optional<S> buyer_full;          // full-information buyer, primal
  std::optional<S> buyer_d_tilde;       // measure-form dual, inf
  std::optional<S> alpha_inf;           // inf over martingale measures

  std::optional<S> gap;               // p_tilde - d_tilde
  std::optional<S> d_minus_alpha;
  std::optional<S> beta_minus_alpha;

  std::vector<Check> checks;
  std::optional<PriceQuote<S>> hedge;
  std::optional<AuditReport<S>> audit;

  bool all_checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  const Check* find_check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct ReportOptions {
  SolveOptions solve;
  double rel_tol = 1e-9;  // floating mode comparisons
  bool with_hedge = true;
};

namespace detail {

template <class S>
bool leq(const S& a, const S& b, double rel_tol) {
  if constexpr (Numeric<S>::exact) {
    return a <= b;
  } else {
    double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return a <= b + rel_tol * scale;
  }
}

template <class S>
bool eq(const S& a, const S& b, double rel_tol) {
  return leq(a, b, rel_tol) && leq(b, a, rel_tol);
}

}  // namespace detail

/// All prices for one market/claim pair with the ordering and duality checks.
template <class S = Rational>
PriceReport<S> price_report(const Market& m, const DelayedView& g, const Claim& b, const ReportOptions& opts = {}) {
  PriceReport<S> rep;
  auto emm = check_emm_exists(m);
  if (!emm) {
    rep.outcome = Outcome::arbitrage;
    rep.message = emm.reason;
    return rep;
  }

  auto value = [&](const LinearProgram& lp, const char* what) -> std::optional<S> {
    auto sol = solve<S>(lp, opts.solve);
    if (sol.status == Status::optimal) return sol.objective;
    rep.outcome = Outcome::solver_failure;
    rep.message += std::string(what) + " is " + to_string(sol.status) + "; ";
    return std::nullopt;
  };

  auto seller = solve_quote<S>(m, g, b, Agent::seller, Information::delayed, opts.solve);
  if (seller.quote) {
    rep.p_tilde = seller.quote->price;
    if (opts.with_hedge) {
      rep.audit = audit_hedge(m, g, b, *seller.quote, Numeric<S>::exact ? 0.0 : opts.solve.tolerance);
      rep.hedge = std::move(seller.quote);
    }
  } else {
    rep.outcome = Outcome::solver_failure;
    rep.message += std::string("delayed seller program is ") + to_string(seller.status) + "; ";
  }
  rep.d_tilde = value(build_measure_dual(m, b), "measure dual");
  rep.exact_dual = m.horizon() >= 4 ? value(build_dual_raw(m, g, b), "raw dual")
                                    : value(build_exact_measure_dual(m, b), "exact dual");
  rep.alpha = value(build_martingale_lp(m, b), "martingale program");
  if (m.horizon() >= 4) rep.beta = value(build_squeeze_lp(m, b), "intermediate program");
  rep.seller_full = value(build_seller_full_lp(m, b), "full-information seller program");
  rep.buyer_delayed = value(build_buyer_delayed_lp(m, g, b), "delayed buyer program");
  rep.buyer_full = value(build_buyer_full_lp(m, b), "full-information buyer program");
  rep.buyer_d_tilde = value(build_measure_dual(m, b, Sense::minimize), "measure dual (inf)");
  rep.alpha_inf = value(build_martingale_lp(m, b, Sense::minimize), "martingale program (inf)");

  const double tol = opts.rel_tol;
  auto check = [&](const char* name, const std::optional<S>& a, const std::optional<S>& c, bool equal) {
    if (!a || !c) return;
    rep.checks.push_back({name, equal ? detail::eq(*a, *c, tol) : detail::leq(*a, *c, tol)});
  };
  if (rep.p_tilde && rep.d_tilde) rep.gap = S(*rep.p_tilde - *rep.d_tilde);
  if (rep.d_tilde && rep.alpha) rep.d_minus_alpha = S(*rep.d_tilde - *rep.alpha);
  if (rep.beta && rep.alpha) rep.beta_minus_alpha = S(*rep.beta - *rep.alpha);

  check("p_tilde_equals_d_tilde", rep.p_tilde, rep.d_tilde, true);
  check("p_tilde_equals_exact_dual", rep.p_tilde, rep.exact_dual, true);
  check("alpha_le_d_tilde", rep.alpha, rep.d_tilde, false);
  if (rep.beta) {
    check("alpha_le_beta", rep.alpha, rep.beta, false);
    check("beta_le_d_tilde", rep.beta, rep.d_tilde, false);
  }
  check("seller_full_equals_alpha", rep.seller_full, rep.alpha, true);
  check("buyer_full_equals_alpha_inf", rep.buyer_full, rep.alpha_inf, true);
  check("buyer_delayed_le_buyer_full", rep.buyer_delayed, rep.buyer_full, false);
  check("buyer_full_le_seller_full", rep.buyer_full, rep.seller_full, false);
  check("seller_full_le_seller_delayed", rep.seller_full, rep.p_tilde, false);
  check("buyer_delayed_equals_inf_dual", rep.buyer_delayed, rep.buyer_d_tilde, true);
  if (rep.audit)
    rep.checks.push_back({"hedge_audit", rep.audit->passed(Numeric<S>::exact ? 0.0 : opts.solve.tolerance)});
  return rep;
}

}  // namespace dip
