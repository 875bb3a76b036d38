#pragma once

/**
 * Scalar backends for the library.
 *
 * Every algebraic computation is templated on a scalar type S:
 *   - Rat  : exact arbitrary-precision rational (GMP). Identity suites run
 *            here; equality is bit-exact.
 *   - double : binary64, used by the Monte Carlo lane and the semigroup
 *            (whose damping factors e^{-n(theta+n-1)t} are irrational).
 *
 * A computation never mixes the two; conversions are explicit.
 */

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dfcalc {

using Rat = mpq_class;

enum class Mode { exact, floating };

inline const char* mode_name(Mode m) { return m == Mode::exact ? "exact" : "float"; }

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr Mode mode = Mode::exact;
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  static bool eq(const Rat& a, const Rat& b, double /*tol*/ = 0.0) { return a == b; }
};

template <>
struct scalar_traits<double> {
  static constexpr Mode mode = Mode::floating;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  // Relative comparison with absolute floor, used wherever exact mode
  // would compare bit-exactly.
  static bool eq(double a, double b, double tol = 1e-9) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
  }
};

inline Rat make_rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }
inline double to_double(double x) { return x; }

inline Rat scalar_cast_rat(const Rat& r) { return r; }

/// "p/q" (or "p" when the denominator is 1).
inline std::string rat_to_string(const Rat& r) {
  std::string s = r.get_num().get_str();
  if (r.get_den() != 1) {
    s += '/';
    s += r.get_den().get_str();
  }
  return s;
}

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0)
    throw std::invalid_argument("cannot parse rational: '" + s + "'");
  r.canonicalize();
  return r;
}

/// Shortest round-trip decimal form, deterministic across runs.
inline std::string double_to_string(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

template <class S>
std::string scalar_to_string(const S& s) {
  if constexpr (std::is_same_v<S, Rat>)
    return rat_to_string(s);
  else
    return double_to_string(s);
}

/// w^(n) = w(w+1)...(w+n-1), with w^(0) = 1.
/// (Concrete overloads: gmpxx expression templates would poison deduction.)
inline Rat rising_factorial(const Rat& w, int n) {
  if (n < 0) throw std::invalid_argument("rising_factorial: negative order");
  Rat r(1);
  for (int i = 0; i < n; ++i) r *= w + i;
  return r;
}

inline double rising_factorial(double w, int n) {
  if (n < 0) throw std::invalid_argument("rising_factorial: negative order");
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= w + i;
  return r;
}

template <class S>
S factorial_s(int n) {
  S r = scalar_traits<S>::one();
  for (int i = 2; i <= n; ++i) r *= S(i);
  return r;
}

inline std::uint64_t factorial_u64(int n) {
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

template <class S>
S ipow(const S& base, int e) {
  S r = scalar_traits<S>::one();
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

/// lhs/rhs of a two-sided identity evaluation.
template <class S>
struct TwoSidedCheck {
  S lhs;
  S rhs;
  bool holds;
};

}  // namespace dfcalc
