#pragma once

#include <gmpxx.h>

#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace lincont {

/// Exact rational number. Every certified quantity in the library is one of these.
/// The (numerator, denominator) constructors canonicalize, which the plain
/// gmpxx ones do not.
class Rational : public mpq_class {
 public:
  using mpq_class::mpq_class;
  Rational() = default;
  Rational(const mpq_class& q) : mpq_class(q) {}
  Rational(mpq_class&& q) : mpq_class(std::move(q)) {}
  template <std::integral N, std::integral D>
  Rational(N num, D den) : mpq_class(static_cast<long>(num), static_cast<long>(den)) {
    canonicalize();
  }
  Rational(const mpz_class& num, const mpz_class& den) : mpq_class(num, den) { canonicalize(); }
};

/// Base class for all errors raised by the library. `code()` is a short
/// machine-readable condition id ("Monotone", "NoBracket", "eta", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error("Domain", what) {}
};

struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& what)
      : Error("InvariantViolation", what) {}
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error("Input", what) {}
};

/// 2^e for any integer e.
Rational pow2(long e);

/// Largest power of two <= x. Requires x > 0.
Rational floor_pow2(const Rational& x);

/// The dyadic rational with the smallest denominator in the open interval
/// (lo, hi); ties broken toward lo. Requires lo < hi.
Rational simplest_dyadic_in(const Rational& lo, const Rational& hi);

/// Round x down onto the grid 2^-bits.
Rational dyadic_floor(const Rational& x, long bits);

/// Canonical "p/q" text (integers are written "p/1").
std::string to_string(const Rational& q);

/// Parses "p/q", "p" or a plain decimal like "0.25" (exactly).
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& q) { return q.get_d(); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline const Rational& min(const Rational& a, const Rational& b) {
  return b < a ? b : a;
}

inline const Rational& max(const Rational& a, const Rational& b) {
  return a < b ? b : a;
}

/// True iff q is the square of a rational.
bool is_rational_square(const Rational& q);

/// Exact square root of a rational square.
Rational rational_sqrt(const Rational& q);

/// Rational r with r*r <= q (r >= 0) and q - r*r small; q >= 0.
Rational sqrt_lower(const Rational& q);

/// Rational r with r*r >= q, r >= 0.
Rational sqrt_upper(const Rational& q);

/// Exact rational for a finite double.
inline Rational from_double(double x) { return Rational(x); }

}  // namespace lincont
