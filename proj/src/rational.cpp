#include "lincont/rational.hpp"

#include <cmath>

namespace lincont {

Rational pow2(long e) {
  mpz_class one = 1;
  mpz_class p;
  mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
  if (e >= 0) return Rational(p);
  Rational r(mpz_class(1), p);
  r.canonicalize();
  return r;
}

Rational floor_pow2(const Rational& x) {
  if (x <= 0) throw DomainError("floor_pow2: argument must be positive");
  // log2 estimate from the sizes of numerator and denominator, then fix up.
  long e = static_cast<long>(mpz_sizeinbase(x.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(x.get_den_mpz_t(), 2));
  Rational p = pow2(e);
  while (p > x) {
    --e;
    p = pow2(e);
  }
  while (pow2(e + 1) <= x) ++e;
  return pow2(e);
}

Rational dyadic_floor(const Rational& x, long bits) {
  Rational scaled = x * pow2(bits);
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  return Rational(fl) * pow2(-bits);
}

Rational simplest_dyadic_in(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw DomainError("simplest_dyadic_in: empty interval");
  // Start at the coarsest grid that can possibly fit, then refine.
  long k = 0;
  Rational width = hi - lo;
  if (width < 1) {
    k = static_cast<long>(mpz_sizeinbase(width.get_den_mpz_t(), 2)) -
        static_cast<long>(mpz_sizeinbase(width.get_num_mpz_t(), 2)) - 1;
    if (k < 0) k = 0;
  }
  for (;; ++k) {
    Rational scaled = lo * pow2(k);
    mpz_class m;
    mpz_fdiv_q(m.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    m += 1;
    Rational cand = Rational(m) * pow2(-k);
    if (cand < hi) return cand;
  }
}

std::string to_string(const Rational& q) {
  std::string s = q.get_num().get_str() + "/" + q.get_den().get_str();
  return s;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw InputError("empty rational");
  auto dot = s.find('.');
  try {
    if (dot != std::string::npos && s.find('/') == std::string::npos) {
      bool neg = s[0] == '-';
      std::string body = neg ? s.substr(1) : s;
      dot = body.find('.');
      std::string ip = body.substr(0, dot);
      std::string fp = body.substr(dot + 1);
      if (ip.empty()) ip = "0";
      mpz_class num(ip + fp, 10);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
      Rational r(num, den);
      r.canonicalize();
      return neg ? Rational(-r) : r;
    }
    Rational r(s);
    if (r.get_den() == 0) throw InputError("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw InputError("malformed rational '" + s + "'");
  }
}

bool is_rational_square(const Rational& q) {
  if (q < 0) return false;
  return mpz_perfect_square_p(q.get_num_mpz_t()) != 0 &&
         mpz_perfect_square_p(q.get_den_mpz_t()) != 0;
}

Rational rational_sqrt(const Rational& q) {
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  Rational r(n, d);
  r.canonicalize();
  return r;
}

namespace {
// sqrt at 2^-bits resolution relative to the magnitude of q.
Rational sqrt_floor_bits(const Rational& q, long bits) {
  Rational scaled = q * pow2(2 * bits);
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), fl.get_mpz_t());
  return Rational(root) * pow2(-bits);
}

long sqrt_bits_for(const Rational& q) {
  long mag = static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2));
  return 64 + (mag > 0 ? mag : 0);
}
}  // namespace

Rational sqrt_lower(const Rational& q) {
  if (q <= 0) return Rational(0);
  return sqrt_floor_bits(q, sqrt_bits_for(q));
}

Rational sqrt_upper(const Rational& q) {
  if (q <= 0) return Rational(0);
  long bits = sqrt_bits_for(q);
  Rational r = sqrt_floor_bits(q, bits);
  if (r * r == q) return r;
  return r + pow2(-bits);
}

}  // namespace lincont
