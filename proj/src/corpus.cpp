#include "qpframe/corpus.hpp"

#include <stdexcept>

namespace qpframe {

namespace {

PadicRational random_digits(long p, SplitMix64& rng) {
  // n / p^d with d <= 3, n < p^d: a point of depth at most 3 below scale 1.
  auto d = static_cast<long long>(rng.below(4));
  Integer span = pow_integer(p, d);
  Integer n(static_cast<unsigned long>(rng.below(span.get_ui())));
  if (n == 0) return PadicRational(p);
  return PadicRational(p, n, -d);
}

}  // namespace

PFunction random_test_function(long p, SplitMix64& rng, bool zero_mean) {
  if (p < 2) throw std::invalid_argument("bad prime");
  for (;;) {
    std::size_t na = 1 + static_cast<std::size_t>(rng.below(3));
    std::vector<Atom> atoms;
    atoms.reserve(na);
    for (std::size_t k = 0; k < na; ++k) {
      long long gamma = -3 + static_cast<long long>(rng.below(6));
      PadicRational center = random_digits(p, rng);
      PadicRational b = random_digits(p, rng);
      long num = 0;
      while (num == 0) num = static_cast<long>(rng.below(33)) - 16;
      long den = 1 + static_cast<long>(rng.below(16));
      atoms.emplace_back(CycScalar(p, Rational(num, den)), b,
                         Ball(gamma, center));
    }
    PFunction g(p, std::move(atoms));
    if (g.is_zero()) continue;
    if (zero_mean) {
      CycScalar total = g.integrate();
      if (!total.is_zero()) {
        long long h = g.hull()->enclosing_exponent_at_zero();
        Atom patch(total.scaled(pow_rational(p, -h)), PadicRational(p),
                   Ball(h, PadicRational(p)));
        g = g - PFunction(p, {patch});
        if (g.is_zero()) continue;
      }
    }
    return g;
  }
}

std::vector<PFunction> corpus_generate(long p, std::uint64_t seed,
                                       std::size_t count, bool zero_mean) {
  if (count == 0) throw std::invalid_argument("corpus size must be positive");
  SplitMix64 rng(seed);
  std::vector<PFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(random_test_function(p, rng, zero_mean));
  return out;
}

}  // namespace qpframe
