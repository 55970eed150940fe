#include <cmath>

#include "doctest.h"
#include "qpframe/corpus.hpp"
#include "qpframe/cyclo.hpp"

using namespace qpframe;

namespace {

CycScalar zeta(long p, long num, long den) {
  return CycScalar::root_of_unity(p, RationalAngle(Rational(num, den)));
}

CycScalar random_scalar(long p, SplitMix64& rng) {
  CycScalar s(p);
  std::size_t terms = 1 + static_cast<std::size_t>(rng.below(3));
  long pp = p * p;
  for (std::size_t t = 0; t < terms; ++t) {
    long num = static_cast<long>(rng.below(33)) - 16;
    if (num == 0) num = 1;
    long den = 1 + static_cast<long>(rng.below(8));
    int h = static_cast<int>(rng.below(2));
    long a = static_cast<long>(rng.below(static_cast<std::uint64_t>(pp)));
    s += CycScalar(p, Rational(num, den), h, RationalAngle(Rational(a, pp)));
  }
  return s;
}

}  // namespace

TEST_CASE("full root sums vanish") {
  for (long p : {2L, 3L, 5L}) {
    CycScalar s(p);
    for (long k = 0; k < p; ++k) s += zeta(p, k, p);
    CHECK(s.is_zero());
  }
  // partial sums do not
  CycScalar t = CycScalar::one(3) + zeta(3, 1, 3);
  CHECK(!t.is_zero());
  CHECK(t.approx_abs() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("abs2 of 1 + zeta_3 is exactly 1") {
  CycScalar t = CycScalar::one(3) + zeta(3, 1, 3);
  CHECK(t.abs2() == CycScalar::one(3));
}

TEST_CASE("roots multiply by adding angles") {
  CHECK(zeta(3, 1, 3) * zeta(3, 2, 3) == CycScalar::one(3));
  CHECK(zeta(3, 1, 9) * zeta(3, 1, 9) == zeta(3, 2, 9));
  CHECK(zeta(2, 1, 2) * zeta(2, 1, 2) == CycScalar::one(2));
  // conjugation inverts the angle
  CHECK(zeta(3, 1, 3).conjugate() == zeta(3, 2, 3));
  CHECK(zeta(5, 2, 5).conjugate() == zeta(5, 3, 5));
}

TEST_CASE("half powers fold in pairs") {
  for (long p : {2L, 3L, 5L}) {
    CHECK(CycScalar::half_power(p, 1) * CycScalar::half_power(p, 1) ==
          CycScalar(p, Rational(p)));
    CHECK(CycScalar::half_power(p, -1) * CycScalar::half_power(p, 1) ==
          CycScalar::one(p));
    CHECK(CycScalar::half_power(p, 2) == CycScalar(p, Rational(p)));
    CHECK(CycScalar::half_power(p, 3) ==
          CycScalar(p, Rational(p)) * CycScalar::half_power(p, 1));
  }
}

TEST_CASE("as_rational only on the rational sector") {
  CHECK(*CycScalar(3, Rational(5, 7)).as_rational() == Rational(5, 7));
  CHECK(!(CycScalar::one(3) + zeta(3, 1, 3)).as_rational());
  CHECK(!CycScalar::half_power(3, 1).as_rational());
}

TEST_CASE("inverses multiply back to one") {
  for (long p : {2L, 3L, 5L}) {
    SplitMix64 rng(500 + static_cast<std::uint64_t>(p));
    int tested = 0;
    while (tested < 25) {
      CycScalar s = random_scalar(p, rng);
      if (s.is_zero()) continue;
      CHECK(s * s.inverse() == CycScalar::one(p));
      ++tested;
    }
    CHECK_THROWS(CycScalar(p).inverse());
  }
}

TEST_CASE("sign_real certifies real signs") {
  CHECK(CycScalar(3, Rational(-5, 7)).sign_real() == -1);
  CHECK(CycScalar(3).sign_real() == 0);
  CHECK((zeta(3, 1, 3) + zeta(3, 2, 3) + CycScalar::one(3)).sign_real() == 0);
  // sqrt(3) - 1 > 0, 1 - sqrt(3) < 0
  CHECK((CycScalar::half_power(3, 1) - CycScalar::one(3)).sign_real() == 1);
  CHECK((CycScalar::one(3) - CycScalar::half_power(3, 1)).sign_real() == -1);
  // 2 cos(2 pi / 5) = golden ratio - 1 > 0
  CHECK((zeta(5, 1, 5) + zeta(5, 4, 5)).sign_real() == 1);
  CHECK((zeta(5, 2, 5) + zeta(5, 3, 5)).sign_real() == -1);
}

TEST_CASE("is_real spots conjugation-symmetric values") {
  SplitMix64 rng(77);
  for (int i = 0; i < 50; ++i) {
    CycScalar s = random_scalar(3, rng);
    CHECK((s + s.conjugate()).is_real());
    CHECK((s * s.conjugate()).is_real());
  }
  CHECK(!zeta(3, 1, 3).is_real());
}

TEST_CASE("numeric evaluation matches known values") {
  auto [re, im] = zeta(3, 1, 3).approx_eval(64);
  CHECK(re == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(im == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  auto [sre, sim] = CycScalar::half_power(5, 1).approx_eval(64);
  CHECK(sre == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(sim == doctest::Approx(0.0));
}

TEST_CASE("reducer agrees with numerics on random scalars") {
  // zero iff tiny: the structural reducer and the floating path must agree
  for (long p : {2L, 3L, 5L}) {
    SplitMix64 rng(3000 + static_cast<std::uint64_t>(p));
    for (int i = 0; i < 400; ++i) {
      CycScalar s = random_scalar(p, rng);
      CycScalar d = s - s;  // exercises cancellation
      CHECK(d.is_zero());
      CHECK(d.approx_abs() < std::ldexp(1.0, -40));
      bool tiny = s.approx_abs() < std::ldexp(1.0, -40);
      CHECK(s.is_zero() == tiny);
    }
  }
}

TEST_CASE("abs2 is conjugate-multiplication") {
  SplitMix64 rng(9);
  for (int i = 0; i < 60; ++i) {
    CycScalar s = random_scalar(5, rng);
    CHECK(s.abs2() == s * s.conjugate());
    CHECK(s.abs2().sign_real() >= 0);
    CHECK((s.abs2().sign_real() == 0) == s.is_zero());
  }
}
