#pragma once

// Exact scalars sum q * p^{h/2} * e^{2 pi i r} with q rational, h in {0,1},
// and r a rational angle with p-power denominator. This subring of C is
// closed under every operation the transform and frame layers perform
// (products fold p^{1/2} pairs into q; angles add mod 1), so equality is
// decidable: terms of each half-power parity are rewritten to the canonical
// power basis of Q(zeta_{p^m}) using
//   sum_{t=0}^{p-1} zeta^{c + t p^{m-1}} = 0,   zeta = e^{2 pi i / p^m},
// after which a value is zero iff no terms remain. The parity split is a
// conservative over-refinement when sqrt(p) lies in Q(zeta_{p^m}) (p = 1 mod
// 4); callers that declare violations must therefore also pass the numeric
// magnitude gate (see approx_eval / sign_real).

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "qpframe/padic.hpp"

namespace qpframe {

class CycScalar {
 public:
  // (h, r) -> q; values q are nonzero and the whole map is kept reduced.
  using TermKey = std::pair<int, Rational>;
  using TermMap = std::map<TermKey, Rational>;

  /// Zero.
  explicit CycScalar(long p);

  /// Rational embedding q * p^{0/2} * e^0.
  CycScalar(long p, const Rational& q);

  /// Single term q * p^{h/2} * e^{2 pi i r}.
  CycScalar(long p, const Rational& q, int h, const RationalAngle& r);

  static CycScalar zero(long p) { return CycScalar(p); }
  static CycScalar one(long p) { return CycScalar(p, Rational(1)); }

  /// e^{2 pi i r}.
  static CycScalar root_of_unity(long p, const RationalAngle& r);

  /// p^{k/2} for any integer k (k = 2e + h with h in {0,1}).
  static CycScalar half_power(long p, long long k);

  long prime() const { return p_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  CycScalar operator+(const CycScalar& o) const;
  CycScalar operator-(const CycScalar& o) const;
  CycScalar operator-() const;
  CycScalar operator*(const CycScalar& o) const;
  CycScalar& operator+=(const CycScalar& o);
  CycScalar& operator-=(const CycScalar& o);
  CycScalar& operator*=(const CycScalar& o);

  CycScalar scaled(const Rational& q) const;

  CycScalar conjugate() const;

  /// |z|^2 = z * conj(z); real by construction.
  CycScalar abs2() const;

  /// Exact field inverse (extended Euclid modulo the p^m-th cyclotomic
  /// polynomial; a sqrt(p) part is cleared by one conjugation step). Throws
  /// on zero and in the sqrt(p) degeneracy where the parity split is not
  /// faithful.
  CycScalar inverse() const;

  /// Structural equality of reduced forms (value equality per parity part).
  bool operator==(const CycScalar& o) const;
  bool operator!=(const CycScalar& o) const { return !(*this == o); }

  /// The rational value if the reduced form is q * e^0 with h = 0.
  std::optional<Rational> as_rational() const;

  bool is_real() const;

  /// Floating evaluation at the requested precision (>= 24 bits); the
  /// returned doubles carry relative error <= 2^{-precision_bits+4} times
  /// the number of terms.
  std::pair<double, double> approx_eval(long precision_bits = 64) const;

  double approx_abs(long precision_bits = 64) const;

  /// Certified sign of a real scalar: exact when rational, else interval
  /// evaluation at doubling precision until separated from zero.
  int sign_real() const;

  std::string to_string() const;

 private:
  void reduce();

  long p_;
  TermMap terms_;
};

}  // namespace qpframe
