#include "qpframe/fourier.hpp"

namespace qpframe {

PFunction fourier(const PFunction& f) {
  long p = f.prime();
  std::vector<Atom> out;
  for (const auto& at : f.atoms()) {
    const PadicRational& a = at.support.center();
    const PadicRational& b = at.modulation;
    CycScalar c = at.coeff.scaled(at.support.measure());
    if (!a.is_zero() && !b.is_zero()) c *= character_value(b, a);
    out.emplace_back(std::move(c), a, Ball(-at.support.gamma(), -b));
  }
  return PFunction(p, std::move(out));
}

PFunction inverse_fourier(const PFunction& f) {
  long p = f.prime();
  std::vector<Atom> out;
  for (const auto& at : f.atoms()) {
    const PadicRational& a = at.support.center();
    const PadicRational& b = at.modulation;
    CycScalar c = at.coeff.scaled(at.support.measure());
    if (!a.is_zero() && !b.is_zero()) c *= character_value(a, b);
    out.emplace_back(std::move(c), -a, Ball(-at.support.gamma(), b));
  }
  return PFunction(p, std::move(out));
}

PlancherelReport plancherel_check(const PFunction& f, const PFunction& g) {
  PlancherelReport r{inner_product(f, g), inner_product(fourier(f), fourier(g)),
                     false};
  r.equal = (r.lhs == r.rhs);
  return r;
}

}  // namespace qpframe
