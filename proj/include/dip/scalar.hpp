#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dip {

/// Exact scalar used for every market input and every exact-mode solve.
using Rational = mpq_class;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "3", "-1.25", "5/4" into an exact rational. Whitespace is not
/// accepted anywhere in the token.
inline Rational parse_scalar(std::string_view text) {
  auto fail = [&](const char* why) -> Rational {
    throw ParseError("invalid scalar \"" + std::string(text) + "\": " + why);
  };
  auto all_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };

  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty()) return fail("empty");

  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail("malformed fraction");
    mpz_class d(std::string(den), 10);
    if (d == 0) return fail("zero denominator");
    value = Rational(mpz_class(std::string(num), 10), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if (whole.empty() && frac.empty()) return fail("malformed decimal");
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
      return fail("malformed decimal");
    std::string digits = std::string(whole) + std::string(frac);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    value = Rational(mpz_class(digits, 10), scale);
  } else {
    if (!all_digits(body)) return fail("not a number");
    value = Rational(mpz_class(std::string(body), 10));
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

/// Canonical "p/q" (or "p" when integral).
inline std::string to_string(const Rational& x) { return x.get_str(); }

inline double to_double(const Rational& x) { return x.get_d(); }

/// Arithmetic policy shared by the exact and floating-point code paths.
/// `tol` is ignored for rationals.
template <class S>
struct Numeric;

template <>
struct Numeric<Rational> {
  static constexpr bool exact = true;

  static Rational from(const Rational& x) { return x; }
  static int sign(const Rational& x, double /*tol*/) { return sgn(x); }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static double as_double(const Rational& x) { return x.get_d(); }
  static std::string str(const Rational& x) { return x.get_str(); }

  // acc -= a * b, reusing `tmp` to avoid an allocation per call.
  static void sub_mul(Rational& acc, const Rational& a, const Rational& b,
                      Rational& tmp) {
    mpq_mul(tmp.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
    mpq_sub(acc.get_mpq_t(), acc.get_mpq_t(), tmp.get_mpq_t());
  }
};

template <>
struct Numeric<double> {
  static constexpr bool exact = false;

  static double from(const Rational& x) { return x.get_d(); }
  static int sign(double x, double tol) {
    if (x > tol) return 1;
    if (x < -tol) return -1;
    return 0;
  }
  static double abs(double x) { return std::fabs(x); }
  static double as_double(double x) { return x; }
  static std::string str(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  static void sub_mul(double& acc, double a, double b, double& /*tmp*/) {
    acc -= a * b;
  }
};

}  // namespace dip
