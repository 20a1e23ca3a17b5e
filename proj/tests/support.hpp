#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "dip/dip.hpp"

namespace dip::test {

inline std::string data(const std::string& name) { return std::string(DIP_DATA_DIR) + "/" + name; }
inline std::string test_data(const std::string& name) { return std::string(DIP_TEST_DATA_DIR) + "/" + name; }

inline Market load(const std::string& name) { return load_market_file(data(name)); }
inline Claim load(const Market& m, const std::string& name) { return load_claim_file(m, data(name)); }

inline Rational q(const char* s) { return parse_scalar(s); }

// Tiny LPs for the oracle comparison: up to 4 variables and 3 rows with small
// integer data, so the standard form stays within the oracle's column budget.
inline LinearProgram tiny_lp(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  LinearProgram lp(pick(0, 1) ? Sense::maximize : Sense::minimize);
  const int n = static_cast<int>(pick(2, 4));
  const int rows = static_cast<int>(pick(2, 3));
  for (int j = 0; j < n; ++j) {
    auto v = lp.add_variable("x" + std::to_string(j), pick(0, 3) == 0 ? VarSign::free : VarSign::nonnegative);
    lp.set_objective(v, Rational(pick(-3, 3)));
  }
  for (int r = 0; r < rows; ++r) {
    LinearExpr e;
    for (int j = 0; j < n; ++j) e.add(j, Rational(pick(-3, 3)));
    const auto rel = static_cast<Relation>(pick(0, 2));
    lp.add_constraint("r" + std::to_string(r), rel, e, Rational(pick(-4, 6)));
  }
  return lp;
}

}  // namespace dip::test
