#pragma once

// Finite linear combinations of modulated ball indicators
//   f(x) = sum_k c_k chi(b_k x) 1_{B_k}(x),   chi(y) = e^{2 pi i {y}_p},
// the dense test-function class the transform and frame layers act on.
// PFunction keeps a normal form: supports pairwise disjoint, modulations
// canonical for their ball (digits at powers < gamma only; coarser digits
// contribute a constant phase on the ball, folded into the coefficient),
// equal (ball, modulation) merged, zero coefficients dropped. Distinct
// atoms in normal form are L2-orthogonal, so f = g iff normalize(f - g)
// is empty, and norms/inner products are finite exact sums.

#include <optional>
#include <string>
#include <vector>

#include "qpframe/cyclo.hpp"
#include "qpframe/padic.hpp"

namespace qpframe {

struct Atom {
  CycScalar coeff;
  PadicRational modulation;
  Ball support;

  // Canonicalizes: support center digits below -gamma, modulation digits
  // below gamma, the discarded phase chi(delta * center) folded into coeff.
  Atom(CycScalar c, PadicRational b, Ball ball);

  bool operator<(const Atom& o) const;
};

/// chi(b a) as an exact scalar, with chi(y) = e^{2 pi i {y}_p}.
CycScalar character_value(const PadicRational& b, const PadicRational& x);

/// Exact value of the oscillatory ball integral: for B = B_gamma(a),
/// int_B chi(b x) dx = chi(b a) p^gamma if |b|_p <= p^{-gamma}, else 0.
CycScalar character_ball_integral(const PadicRational& b, const Ball& ball);

class PFunction {
 public:
  explicit PFunction(long p) : p_(p) {}
  PFunction(long p, std::vector<Atom> atoms);

  long prime() const { return p_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool is_zero() const { return atoms_.empty(); }

  CycScalar evaluate(const PadicRational& x) const;
  CycScalar integrate() const;

  PFunction operator+(const PFunction& o) const;
  PFunction operator-(const PFunction& o) const;
  PFunction operator-() const;
  PFunction scaled(const CycScalar& c) const;
  PFunction conjugate() const;

  /// Merges sibling atoms back into parent-ball atoms where the combined
  /// function is a single modulated indicator; minimizes the atom count.
  PFunction coarsened() const;

  /// Smallest ball containing the support (nullopt when zero).
  std::optional<Ball> hull() const;

  /// Largest c with f constant on every ball of radius p^c meeting supp f:
  /// min over atoms of min(gamma_k, val(b_k)).
  long long constancy_exponent() const;

  std::string to_string() const;

 private:
  void normalize();

  long p_;
  std::vector<Atom> atoms_;
};

/// <f, g> = int f conj(g), exact.
CycScalar inner_product(const PFunction& f, const PFunction& g);

/// <f, f>, a real scalar (rational whenever coefficient abs2 are rational).
CycScalar norm2(const PFunction& f);

/// f_{j,a}(x) = p^{j/2} f(p^{-j} x - a): atom (c, b, B_gamma(alpha)) maps to
/// (c p^{j/2} chi(-b a), p^{-j} b, B_{gamma - j}(p^j (a + alpha))).
PFunction dilate_translate(const PFunction& f, long long j,
                           const PadicRational& a);

/// f(x - beta).
PFunction translate(const PFunction& f, const PadicRational& beta);

/// chi(beta x) f(x).
PFunction modulate(const PFunction& f, const PadicRational& beta);

/// p^{j/2} f(p^{-j} x).
PFunction dilate(const PFunction& f, long long j);

/// Exact a.e. equality: normalize(f - g) has no atoms.
bool equal_as_functions(const PFunction& f, const PFunction& g);

}  // namespace qpframe
