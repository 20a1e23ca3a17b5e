#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dip/scalar.hpp"

namespace dip {

enum class Sense { minimize, maximize };
enum class VarSign { free, nonnegative };
enum class Relation { less_equal, equal, greater_equal };

struct Variable {
  std::string name;
  VarSign sign = VarSign::free;
};

struct Term {
  std::size_t var = 0;
  Rational coef;
};

struct Constraint {
  std::string name;
  Relation relation = Relation::equal;
  std::vector<Term> terms;  // sorted by variable, no zero coefficients
  Rational rhs;
};

class LpError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Sparse linear accumulator; merges repeated variables and keeps terms in
/// variable order so generated programs are deterministic.
class LinearExpr {
 public:
  LinearExpr& add(std::size_t var, const Rational& coef) {
    if (coef != 0) coefs_[var] += coef;
    return *this;
  }
  std::vector<Term> terms() const {
    std::vector<Term> out;
    for (const auto& [v, c] : coefs_)
      if (c != 0) out.push_back({v, c});
    return out;
  }
  bool empty() const {
    for (const auto& [v, c] : coefs_)
      if (c != 0) return false;
    return true;
  }

 private:
  std::map<std::size_t, Rational> coefs_;
};

/// General-form LP with exact coefficients.
class LinearProgram {
 public:
  explicit LinearProgram(Sense sense = Sense::minimize) : sense_(sense) {}

  Sense sense() const { return sense_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Rational>& objective() const { return objective_; }

  std::size_t add_variable(std::string name, VarSign sign) {
    if (!var_index_.emplace(name, variables_.size()).second)
      throw LpError("duplicate variable name \"" + name + "\"");
    variables_.push_back({std::move(name), sign});
    objective_.emplace_back(0);
    return variables_.size() - 1;
  }

  void set_objective(std::size_t var, Rational coef) { objective_.at(var) = std::move(coef); }

  std::size_t add_constraint(std::string name, Relation rel, const LinearExpr& expr, Rational rhs) {
    auto terms = expr.terms();
    for (const auto& t : terms)
      if (t.var >= variables_.size()) throw LpError("constraint \"" + name + "\" uses an undeclared variable");
    if (!con_index_.emplace(name, constraints_.size()).second)
      throw LpError("duplicate constraint name \"" + name + "\"");
    constraints_.push_back({std::move(name), rel, std::move(terms), std::move(rhs)});
    return constraints_.size() - 1;
  }

  /// Adds the constraint unless it reads 0 (rel) 0.
  std::optional<std::size_t> add_nontrivial(std::string name, Relation rel, const LinearExpr& expr,
                                            Rational rhs) {
    if (expr.empty() && rhs == 0) return std::nullopt;
    return add_constraint(std::move(name), rel, expr, std::move(rhs));
  }

  std::size_t variable(const std::string& name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) throw LpError("no variable \"" + name + "\"");
    return it->second;
  }
  bool has_variable(const std::string& name) const { return var_index_.count(name) != 0; }
  std::size_t constraint(const std::string& name) const {
    auto it = con_index_.find(name);
    if (it == con_index_.end()) throw LpError("no constraint \"" + name + "\"");
    return it->second;
  }
  bool has_constraint(const std::string& name) const { return con_index_.count(name) != 0; }

 private:
  Sense sense_;
  std::vector<Variable> variables_;
  std::vector<Rational> objective_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, std::size_t> var_index_;
  std::unordered_map<std::string, std::size_t> con_index_;
};

enum class Status { optimal, infeasible, unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "?";
}

/// Result of a solve. `primal` is indexed like LinearProgram::variables(),
/// `duals` like constraints(). Duals are shadow prices d(objective)/d(rhs), so
/// b.y equals the optimal objective.
template <class S>
struct Solution {
  Status status = Status::infeasible;
  S objective{};
  std::vector<S> primal;
  std::vector<S> duals;
  std::size_t pivots = 0;

  // Filled only when tracing is requested: objective of every phase-2 basis
  // (each one primal feasible) and every basis visited, as sorted column sets.
  std::vector<S> objective_trace;
  std::vector<std::vector<std::size_t>> basis_trace;

  const S& value(const LinearProgram& lp, const std::string& var) const {
    return primal.at(lp.variable(var));
  }
  const S& dual(const LinearProgram& lp, const std::string& con) const {
    return duals.at(lp.constraint(con));
  }
};

template <class S>
S row_activity(const Constraint& c, const std::vector<S>& x) {
  S sum{};
  for (const auto& t : c.terms) sum += Numeric<S>::from(t.coef) * x.at(t.var);
  return sum;
}

/// Amount by which x violates a constraint (zero when satisfied).
template <class S>
S violation(const Constraint& c, const std::vector<S>& x) {
  S diff = row_activity(c, x) - Numeric<S>::from(c.rhs);
  switch (c.relation) {
    case Relation::less_equal: return diff > 0 ? diff : S{};
    case Relation::greater_equal: return diff < 0 ? S(-diff) : S{};
    case Relation::equal: return Numeric<S>::abs(diff);
  }
  return S{};
}

template <class S>
S objective_value(const LinearProgram& lp, const std::vector<S>& x) {
  S sum{};
  for (std::size_t j = 0; j < x.size(); ++j) sum += Numeric<S>::from(lp.objective()[j]) * x[j];
  return sum;
}

/// Largest violation over rows and sign restrictions, plus the offending names.
template <class S>
struct Evaluation {
  S max_violation{};
  std::vector<std::pair<std::string, S>> violated;
};

template <class S>
Evaluation<S> evaluate(const LinearProgram& lp, const std::vector<S>& x, double tol = 0) {
  if (x.size() != lp.variables().size()) throw LpError("assignment has the wrong number of variables");
  Evaluation<S> ev;
  auto note = [&](const std::string& name, const S& amount) {
    if (Numeric<S>::sign(amount, tol) > 0) ev.violated.emplace_back(name, amount);
    if (amount > ev.max_violation) ev.max_violation = amount;
  };
  for (std::size_t j = 0; j < x.size(); ++j)
    if (lp.variables()[j].sign == VarSign::nonnegative && x[j] < 0) note(lp.variables()[j].name, S(-x[j]));
  for (const auto& c : lp.constraints()) note(c.name, violation(c, x));
  return ev;
}

/// Assignment built from a name -> value map; unnamed variables are zero.
template <class S>
std::vector<S> assignment(const LinearProgram& lp, const std::map<std::string, S>& values) {
  std::vector<S> x(lp.variables().size());
  for (const auto& [name, v] : values) x.at(lp.variable(name)) = v;
  return x;
}

/// Plain-text dump, one line per row, for cross-checking with external tools.
inline std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream out;
  auto expr = [&](const std::vector<Term>& terms) {
    std::string s;
    for (const auto& t : terms) s += " " + to_string(t.coef) + " " + lp.variables()[t.var].name;
    return s.empty() ? std::string(" 0") : s;
  };
  out << (lp.sense() == Sense::minimize ? "minimize" : "maximize") << ":";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < lp.objective().size(); ++j)
    if (lp.objective()[j] != 0) obj.push_back({j, lp.objective()[j]});
  out << expr(obj) << "\n";
  for (const auto& v : lp.variables())
    out << "var " << v.name << (v.sign == VarSign::free ? " free" : " >=0") << "\n";
  for (const auto& c : lp.constraints()) {
    const char* rel = c.relation == Relation::less_equal ? "<=" : c.relation == Relation::equal ? "=" : ">=";
    out << c.name << ":" << expr(c.terms) << " " << rel << " " << to_string(c.rhs) << "\n";
  }
  return out.str();
}

/// LP dual under the shadow-price convention used by Solution::duals: one
/// dual variable per row named "dual[<row>]"; rows whose multiplier is
/// sign-restricted to be non-positive are represented by their negation,
/// named "neg[<row>]". Both programs have the same optimal value.
inline LinearProgram dualize(const LinearProgram& lp) {
  const bool minimize = lp.sense() == Sense::minimize;
  LinearProgram dual(minimize ? Sense::maximize : Sense::minimize);
  // Row multiplier sign: +1 means y >= 0, -1 means y <= 0 (stored negated), 0 free.
  std::vector<int> flip(lp.constraints().size(), 1);
  std::vector<std::size_t> vars;
  for (std::size_t r = 0; r < lp.constraints().size(); ++r) {
    const auto& c = lp.constraints()[r];
    int restriction = 0;
    if (c.relation == Relation::greater_equal) restriction = minimize ? 1 : -1;
    if (c.relation == Relation::less_equal) restriction = minimize ? -1 : 1;
    flip[r] = restriction == -1 ? -1 : 1;
    auto name = (restriction == -1 ? "neg[" : "dual[") + c.name + "]";
    vars.push_back(dual.add_variable(name, restriction == 0 ? VarSign::free : VarSign::nonnegative));
    dual.set_objective(vars.back(), flip[r] * c.rhs);
  }
  std::vector<LinearExpr> cols(lp.variables().size());
  for (std::size_t r = 0; r < lp.constraints().size(); ++r)
    for (const auto& t : lp.constraints()[r].terms) cols[t.var].add(vars[r], flip[r] * t.coef);
  for (std::size_t j = 0; j < lp.variables().size(); ++j) {
    Relation rel = Relation::equal;
    if (lp.variables()[j].sign == VarSign::nonnegative)
      rel = minimize ? Relation::less_equal : Relation::greater_equal;
    dual.add_constraint("col[" + lp.variables()[j].name + "]", rel, cols[j], lp.objective()[j]);
  }
  return dual;
}

}  // namespace dip
