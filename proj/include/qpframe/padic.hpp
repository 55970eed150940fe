#pragma once

// Exact p-adic scalars, angles, and balls.
//
// PadicRational is the ring Z[1/p] of p-adic rationals u*p^v (p coprime to u),
// which is dense in Q_p and closed under the operations used everywhere else:
// ring arithmetic, valuation/norm, fractional part, and digit truncation.
// RationalAngle is a rational number of turns in [0,1) with p-power
// denominator; chi_p(x) = e^{2 pi i {x}_p} factors through it.
// Ball is a compact-open ball B_gamma(a) = {x : |x - a|_p <= p^gamma} with a
// canonical center (digits at powers >= -gamma cleared), so structural
// equality coincides with set equality.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qpframe {

using Integer = mpz_class;
using Rational = mpq_class;

/// p^e as an exact rational (e may be negative).
Rational pow_rational(long p, long long e);

/// p^e as an integer; requires e >= 0.
Integer pow_integer(long p, long long e);

class PadicRational {
 public:
  /// Zero in Z[1/p].
  explicit PadicRational(long p);

  /// u * p^v, normalized so that p does not divide the stored unit.
  PadicRational(long p, Integer u, long long v);

  /// Integer embedding n -> n * p^0 (normalized).
  PadicRational(long p, long n);

  /// Exact conversion from a rational whose denominator is a power of p.
  static PadicRational from_rational(long p, const Rational& q);

  /// Parses "0", "u", or "u*p^v" (p must match); also accepts "n/d" with
  /// d a power of p.
  static PadicRational parse(long p, const std::string& text);

  long prime() const { return p_; }
  bool is_zero() const { return u_ == 0; }
  const Integer& unit() const { return u_; }
  long long vexp() const { return v_; }

  /// p-adic valuation; nullopt encodes +infinity (the valuation of 0).
  std::optional<long long> valuation() const;

  /// |x|_p = p^{-v} as an exact rational (0 for x = 0).
  Rational norm_exact() const;

  /// Value as an ordinary rational u * p^v.
  Rational value() const;

  /// {x}_p = sum of the digits at negative powers; lies in [0,1) and has
  /// denominator exactly p^{-v} when v < 0, else 0.
  Rational frac_part() const;

  /// {x}_p as an element of Z[1/p] (the canonical I_p representative of
  /// x mod Z_p).
  PadicRational frac_part_padic() const;

  /// Keeps only the digits at powers < g (reduction modulo p^g Z_p with the
  /// representative whose digits at powers >= g vanish).
  PadicRational truncate_at(long long g) const;

  /// x * p^k.
  PadicRational shift(long long k) const;

  PadicRational operator-() const;
  PadicRational operator+(const PadicRational& o) const;
  PadicRational operator-(const PadicRational& o) const;
  PadicRational operator*(const PadicRational& o) const;

  bool operator==(const PadicRational& o) const;
  bool operator!=(const PadicRational& o) const { return !(*this == o); }

  /// Deterministic total order: zero first, then shallower expansions
  /// (larger v) first, ties by unit. Used for all serialized orderings.
  bool operator<(const PadicRational& o) const;

  /// "0" or "u*p^v".
  std::string to_string() const;

 private:
  void normalize();

  long p_;
  Integer u_;
  long long v_;
};

/// Number of turns in [0,1); the argument of a root of unity.
class RationalAngle {
 public:
  RationalAngle();  // zero turns
  /// Reduces any rational to its representative modulo 1 in [0,1).
  explicit RationalAngle(const Rational& turns);

  static RationalAngle parse(const std::string& text);

  const Rational& turns() const { return r_; }
  bool is_zero() const { return r_ == 0; }

  RationalAngle operator+(const RationalAngle& o) const;
  RationalAngle operator-() const;
  RationalAngle scaled(const Integer& n) const;

  /// m such that the reduced denominator equals p^m; throws if it is not a
  /// power of p.
  long long denominator_exponent(long p) const;

  bool operator==(const RationalAngle& o) const { return r_ == o.r_; }
  bool operator<(const RationalAngle& o) const { return r_ < o.r_; }

  std::string to_string() const;  // "num/den" (den may be 1)

 private:
  Rational r_;
};

/// Angle of chi_p at x, i.e. {x}_p turns.
RationalAngle character_angle(const PadicRational& x);

enum class BallRelation { Equal, Disjoint, FirstInsideSecond, SecondInsideFirst };

class Ball {
 public:
  /// B_gamma(center); the stored center is canonical (digits at powers
  /// >= -gamma cleared), so equal balls compare equal structurally.
  Ball(long long gamma, const PadicRational& center);

  long prime() const { return center_.prime(); }
  long long gamma() const { return gamma_; }
  const PadicRational& center() const { return center_; }

  /// Haar measure p^gamma.
  Rational measure() const;

  bool contains(const PadicRational& x) const;

  /// The p disjoint children of radius p^{gamma-1}, centers a + i*p^{-gamma},
  /// in digit order i = 0..p-1.
  std::vector<Ball> children() const;

  /// Nested-or-disjoint dichotomy; Equal iff same gamma and same canonical
  /// center. "Inside" is strict (gamma differs).
  BallRelation relation(const Ball& o) const;

  /// Smallest ball containing both (exists for any two balls).
  static Ball enclosing(const Ball& a, const Ball& b);

  /// Smallest J with this ball contained in B_J(0).
  long long enclosing_exponent_at_zero() const;

  /// Canonical I_p representatives of the unit balls meeting this ball:
  /// p^gamma of them when gamma >= 0, at most one when gamma < 0 (a ball
  /// deeper than radius 1 need not meet I_p at all).
  std::vector<PadicRational> ip_representatives() const;

  bool operator==(const Ball& o) const;
  bool operator!=(const Ball& o) const { return !(*this == o); }
  bool operator<(const Ball& o) const;  // (gamma, center) order

  std::string to_string() const;

 private:
  long long gamma_;
  PadicRational center_;
};

}  // namespace qpframe
