#pragma once

// Exact Fourier transform with kernel chi(xi x): a modulated indicator maps
// to a modulated indicator,
//   F[c chi(b .) 1_{B_gamma(a)}](xi) = c p^gamma chi(a b) chi(a xi)
//                                      1_{B_{-gamma}(-b)}(xi),
// so the class of PFunction is preserved and F is computed atomwise.

#include "qpframe/function.hpp"

namespace qpframe {

PFunction fourier(const PFunction& f);

/// Inverse transform, kernel chi(-x xi); inverse_fourier(fourier(f)) == f.
PFunction inverse_fourier(const PFunction& f);

struct PlancherelReport {
  CycScalar lhs;  // <f, g>
  CycScalar rhs;  // <Ff, Fg>
  bool equal;
};

PlancherelReport plancherel_check(const PFunction& f, const PFunction& g);

}  // namespace qpframe
