#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bauc {

/// Exact arbitrary-precision rational scalar (EXACT arithmetic mode).
using Rational = mpq_class;

/// Thrown when an operation would exceed its configured size cap.
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a problem instance has no feasible solution.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tolerance policy per scalar type. FLOAT mode uses absolute tolerance 1e-9
// throughout; EXACT mode compares exactly.
template <class R>
struct Num;

template <>
struct Num<double> {
  static constexpr bool exact = false;
  static double tol() { return 1e-9; }
  // pivot eligibility threshold for the simplex; tighter than tol()
  static double pivotTol() { return 1e-11; }
  // fractions below this are zeroed before slot packing
  static double dropTol() { return 1e-12; }

  static bool isZero(double a) { return std::fabs(a) <= tol(); }
  static bool leq(double a, double b) { return a <= b + tol(); }
  static bool geq(double a, double b) { return a + tol() >= b; }
  static bool eq(double a, double b) { return std::fabs(a - b) <= tol(); }

  static double fromDouble(double x) { return x; }
  static double fromInt(long x) { return static_cast<double>(x); }
  static double toDouble(double x) { return x; }
  static std::string str(double x) { return std::to_string(x); }
};

template <>
struct Num<Rational> {
  static constexpr bool exact = true;
  static Rational tol() { return Rational(0); }
  static Rational pivotTol() { return Rational(0); }
  static Rational dropTol() { return Rational(0); }

  static bool isZero(const Rational& a) { return sgn(a) == 0; }
  static bool leq(const Rational& a, const Rational& b) { return a <= b; }
  static bool geq(const Rational& a, const Rational& b) { return a >= b; }
  static bool eq(const Rational& a, const Rational& b) { return a == b; }

  // exact: every double is a dyadic rational
  static Rational fromDouble(double x) { return Rational(x); }
  static Rational fromInt(long x) { return Rational(x); }
  static double toDouble(const Rational& x) { return x.get_d(); }
  static std::string str(const Rational& x) { return x.get_str(); }
};

/// num/den with canonicalization (mpq_class(n, d) alone does not reduce).
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace bauc
