#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dip/lp.hpp"

namespace dip {

/// Optimality certificate of a (primal, dual) pair. Every field is a
/// non-negative magnitude; all are exactly zero for an exact optimal solve.
template <class S>
struct CertificateReport {
  S primal_residual{};          // worst row or sign violation of x
  S dual_sign_violation{};      // multipliers with the wrong sign for their row
  S dual_residual{};            // reduced-cost infeasibility of y
  S complementary_slackness{};  // worst |y_r * slack_r| or |x_j * reduced cost_j|
  S objective_gap{};            // |c.x - b.y|

  bool ok(double tol = 0) const {
    return Numeric<S>::sign(primal_residual, tol) == 0 && Numeric<S>::sign(dual_sign_violation, tol) == 0 &&
           Numeric<S>::sign(dual_residual, tol) == 0 && Numeric<S>::sign(complementary_slackness, tol) == 0 &&
           Numeric<S>::sign(objective_gap, tol) == 0;
  }
};

template <class S>
CertificateReport<S> check_certificates(const LinearProgram& lp, const Solution<S>& sol) {
  CertificateReport<S> rep;
  if (sol.status != Status::optimal) throw LpError("certificates exist only for optimal solutions");
  const bool minimize = lp.sense() == Sense::minimize;
  const auto& x = sol.primal;
  const auto& y = sol.duals;
  auto bump = [](S& field, const S& v) {
    S a = Numeric<S>::abs(v);
    if (a > field) field = a;
  };

  rep.primal_residual = evaluate(lp, x).max_violation;

  // Shadow-price signs: in a minimization a ">=" row can only raise the
  // optimum (y >= 0) and a "<=" row only lower it (y <= 0); reversed for max.
  std::vector<S> reduced(lp.variables().size());
  for (std::size_t j = 0; j < reduced.size(); ++j) reduced[j] = Numeric<S>::from(lp.objective()[j]);
  S dual_obj{};
  for (std::size_t r = 0; r < lp.constraints().size(); ++r) {
    const auto& c = lp.constraints()[r];
    int expected = 0;
    if (c.relation == Relation::greater_equal) expected = minimize ? 1 : -1;
    if (c.relation == Relation::less_equal) expected = minimize ? -1 : 1;
    if (expected == 1 && y[r] < 0) bump(rep.dual_sign_violation, y[r]);
    if (expected == -1 && y[r] > 0) bump(rep.dual_sign_violation, y[r]);

    S slack = row_activity(c, x) - Numeric<S>::from(c.rhs);
    bump(rep.complementary_slackness, S(y[r] * slack));
    for (const auto& t : c.terms) reduced[t.var] -= Numeric<S>::from(t.coef) * y[r];
    dual_obj += Numeric<S>::from(c.rhs) * y[r];
  }
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    const S& d = reduced[j];
    if (lp.variables()[j].sign == VarSign::free) {
      bump(rep.dual_residual, d);
    } else {
      if (minimize && d < 0) bump(rep.dual_residual, d);
      if (!minimize && d > 0) bump(rep.dual_residual, d);
      bump(rep.complementary_slackness, S(x[j] * d));
    }
  }
  rep.objective_gap = Numeric<S>::abs(S(objective_value(lp, x) - dual_obj));
  return rep;
}

}  // namespace dip
