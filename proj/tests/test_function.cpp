#include <cmath>

#include "doctest.h"
#include "qpframe/corpus.hpp"
#include "qpframe/frame.hpp"
#include "qpframe/function.hpp"

using namespace qpframe;

namespace {

PFunction unit_ball_indicator(long p) {
  std::vector<Atom> atoms;
  atoms.emplace_back(CycScalar::one(p), PadicRational(p),
                     Ball(0, PadicRational(p)));
  return PFunction(p, std::move(atoms));
}

CycScalar zeta(long p, long num, long den) {
  return CycScalar::root_of_unity(p, RationalAngle(Rational(num, den)));
}

}  // namespace

TEST_CASE("evaluation of a wavelet") {
  PFunction theta1 = kozyrev_generators(3).generators[0];
  CHECK(theta1.evaluate(PadicRational(3)) == CycScalar::one(3));
  CHECK(theta1.evaluate(PadicRational(3, 1L)) == zeta(3, 1, 3));
  CHECK(theta1.evaluate(PadicRational(3, 2L)) == zeta(3, 2, 3));
  CHECK(theta1.evaluate(PadicRational::parse(3, "1/3")).is_zero());
}

TEST_CASE("integrals: wavelets have zero mean, indicators their measure") {
  for (long p : {2L, 3L, 5L}) {
    for (const PFunction& g : kozyrev_generators(p).generators)
      CHECK(g.integrate().is_zero());
    CHECK(unit_ball_indicator(p).integrate() == CycScalar::one(p));
  }
}

TEST_CASE("normal form merges and cancels") {
  long p = 3;
  PFunction one = unit_ball_indicator(p);
  // split into children and back
  std::vector<Atom> pieces;
  for (const Ball& c : Ball(0, PadicRational(p)).children())
    pieces.emplace_back(CycScalar::one(p), PadicRational(p), c);
  PFunction split(p, std::move(pieces));
  CHECK(equal_as_functions(split, one));
  CHECK(split.coarsened().atoms().size() == 1);

  PFunction theta = kozyrev_generators(p).generators[0];
  CHECK(equal_as_functions(one + theta - theta, one));
  CHECK((theta - theta).is_zero());
}

TEST_CASE("inner products of the wavelet family") {
  long p = 3;
  auto gens = kozyrev_generators(p).generators;
  CHECK(inner_product(gens[0], gens[0]) == CycScalar::one(p));
  CHECK(inner_product(gens[1], gens[1]) == CycScalar::one(p));
  CHECK(inner_product(gens[0], gens[1]).is_zero());
  CHECK(inner_product(unit_ball_indicator(p), gens[0]).is_zero());
  CHECK(norm2(unit_ball_indicator(p)) == CycScalar::one(p));
}

TEST_CASE("character ball integrals") {
  long p = 3;
  Ball zp(0, PadicRational(p));
  CHECK(character_ball_integral(PadicRational(p), zp) == CycScalar::one(p));
  CHECK(character_ball_integral(PadicRational(p, 1L), zp) ==
        CycScalar::one(p));
  CHECK(character_ball_integral(PadicRational::parse(p, "1/3"), zp).is_zero());
  Ball big(1, PadicRational(p));
  CHECK(character_ball_integral(PadicRational(p), big) ==
        CycScalar(p, Rational(3)));
  CHECK(character_ball_integral(PadicRational(p, 1L), big).is_zero());
  // off-center ball picks up the character at its center
  Ball shifted(-1, PadicRational(p, 1L));
  CHECK(character_ball_integral(PadicRational::parse(p, "1/3"), shifted) ==
        zeta(p, 1, 3).scaled(Rational(1, 3)));
}

TEST_CASE("dilate-translate is unitary and composes") {
  long p = 3;
  SplitMix64 rng(21);
  for (int i = 0; i < 20; ++i) {
    PFunction f = random_test_function(p, rng);
    PadicRational a1 = PadicRational::parse(p, "1/3");
    PadicRational a2 = PadicRational::parse(p, "2/9");
    long long j1 = static_cast<long long>(rng.below(5)) - 2;
    long long j2 = static_cast<long long>(rng.below(5)) - 2;

    PFunction u = dilate_translate(f, j1, a1);
    CHECK(norm2(u) == norm2(f));
    CHECK(inner_product(u, u) == inner_product(f, f));

    // U_{j1,a1} U_{j2,a2} = U_{j1+j2, p^{-j2} a1 + a2}
    PFunction lhs = dilate_translate(dilate_translate(f, j2, a2), j1, a1);
    PFunction rhs = dilate_translate(f, j1 + j2, a1.shift(-j2) + a2);
    CHECK(equal_as_functions(lhs, rhs));

    // inverse
    PFunction back =
        dilate_translate(u, -j1, PadicRational(p) - a1.shift(j1));
    CHECK(equal_as_functions(back, f));
  }
}

TEST_CASE("support scales with the dilation") {
  long p = 3;
  PFunction f = unit_ball_indicator(p);
  PFunction fine = dilate_translate(f, 2, PadicRational(p));
  PFunction coarse = dilate_translate(f, -1, PadicRational(p));
  CHECK(fine.hull()->measure() == Rational(1, 9));
  CHECK(coarse.hull()->measure() == Rational(3));
  CHECK(f.constancy_exponent() <= 0);
}

TEST_CASE("translate and modulate act pointwise") {
  long p = 3;
  PFunction theta = kozyrev_generators(p).generators[0];
  PadicRational a(p, 1L);
  PFunction moved = translate(theta, a);
  CHECK(moved.evaluate(a) == theta.evaluate(PadicRational(p)));
  PFunction waved = modulate(theta, PadicRational::parse(p, "1/3"));
  CHECK(waved.evaluate(PadicRational(p, 1L)) ==
        zeta(p, 1, 3) * theta.evaluate(PadicRational(p, 1L)));
  CHECK(norm2(moved) == norm2(theta));
  CHECK(norm2(waved) == norm2(theta));
}

TEST_CASE("cauchy-schwarz numerically on random pairs") {
  SplitMix64 rng(64);
  for (int i = 0; i < 40; ++i) {
    PFunction f = random_test_function(3, rng);
    PFunction g = random_test_function(3, rng);
    double ip = inner_product(f, g).abs2().approx_abs();
    double bound = norm2(f).approx_abs() * norm2(g).approx_abs();
    CHECK(ip <= bound * (1 + std::ldexp(1.0, -40)));
  }
}
