#include <cmath>

#include "doctest.h"
#include "qpframe/corpus.hpp"
#include "qpframe/frame.hpp"
#include "qpframe/window.hpp"

using namespace qpframe;

namespace {

GeneratorSet weighted_system() {
  GeneratorSet g = kozyrev_generators(3);
  g.generators[0] = g.generators[0].scaled(CycScalar(3, Rational(2)));
  g.label = "weighted";
  return g;
}

GeneratorSet mean_system(long p) {
  GeneratorSet g;
  g.p = p;
  g.label = "mean";
  std::vector<Atom> atoms;
  atoms.emplace_back(CycScalar::one(p), PadicRational(p),
                     Ball(0, PadicRational(p)));
  g.generators.emplace_back(p, std::move(atoms));
  return g;
}

}  // namespace

TEST_CASE("window construction is validated") {
  WindowSpace w = make_window(3, 0, -1);
  CHECK(w.dimension() == 3);
  CHECK(w.cell_norm2() == Rational(1, 3));
  CHECK_THROWS_AS(make_window(3, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_window(3, 9, 0), std::invalid_argument);  // too large
}

TEST_CASE("parseval systems compress to the identity") {
  WindowSpace w = make_window(3, 0, -1);
  WindowMatrix m =
      window_matrix(WindowMatrixKind::FrameOperator, kozyrev_generators(3), w);
  CHECK(m.hermitian);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(m.entry[i][k] ==
            (i == k ? CycScalar::one(3) : CycScalar::zero(3)));
}

TEST_CASE("weighted compression has the derived spectrum") {
  WindowSpace w = make_window(3, 0, -1);
  WindowMatrix m =
      window_matrix(WindowMatrixKind::FrameOperator, weighted_system(), w);
  CHECK(m.hermitian);
  // char poly (t-1)(t-5/2)(t-4) = t^3 - 15/2 t^2 + 33/2 t - 10: the window
  // holds the two wavelet directions (eigenvalues 4 and 1) and the mean
  // direction, whose Rayleigh value is 1 + 3/2
  auto coeff = characteristic_polynomial(m);
  REQUIRE(coeff.size() == 4);
  CHECK(coeff[0] == CycScalar(3, Rational(-10)));
  CHECK(coeff[1] == CycScalar(3, Rational(33, 2)));
  CHECK(coeff[2] == CycScalar(3, Rational(-15, 2)));
  CHECK(coeff[3] == CycScalar::one(3));

  FrameBounds claimed;
  claimed.a = Rational(1);
  claimed.b = Rational(4);
  WindowCertificate cert = certify_window_bounds(m, claimed);
  CHECK(cert.valid);
  CHECK(cert.lower_attained);
  CHECK(cert.upper_attained);

  FrameBounds loose;
  loose.a = Rational(1, 2);
  loose.b = Rational(9, 2);
  WindowCertificate c2 = certify_window_bounds(m, loose);
  CHECK(c2.valid);
  CHECK(!c2.lower_attained);
  CHECK(!c2.upper_attained);

  FrameBounds wrong;
  wrong.a = Rational(2);
  wrong.b = Rational(4);
  CHECK(!certify_window_bounds(m, wrong).valid);
}

TEST_CASE("gram compression of an orthonormal family is the identity") {
  WindowSpace w = make_window(3, 0, -1);
  WindowMatrix m =
      window_matrix(WindowMatrixKind::Gram, kozyrev_generators(3), w);
  CHECK(m.hermitian);
  REQUIRE(m.entry.size() == m.index.size());
  for (std::size_t i = 0; i < m.entry.size(); ++i)
    for (std::size_t k = 0; k < m.entry.size(); ++k)
      CHECK(m.entry[i][k] ==
            (i == k ? CycScalar::one(3) : CycScalar::zero(3)));
}

TEST_CASE("window invariance trichotomy") {
  WindowSpace w = make_window(3, 0, -1);
  CHECK(window_invariance(kozyrev_generators(3), w) ==
        WindowInvariance::Invariant);
  CHECK(window_invariance(doubled_generators(kozyrev_generators(3)), w) ==
        WindowInvariance::Invariant);
  CHECK(window_invariance(weighted_system(), w) ==
        WindowInvariance::NotInvariant);
  CHECK(window_invariance(mean_system(3), w) == WindowInvariance::Unknown);
}

TEST_CASE("window dual solves the compressed system exactly") {
  WindowSpace w = make_window(3, 0, -1);
  GeneratorSet dbl = doubled_generators(kozyrev_generators(3));
  GeneratorSet dual = window_dual(dbl, w);
  REQUIRE(dual.generators.size() == dbl.generators.size());
  for (std::size_t i = 0; i < dual.generators.size(); ++i)
    CHECK(equal_as_functions(
        dual.generators[i],
        dbl.generators[i].scaled(CycScalar(3, Rational(1, 2)))));
  CHECK_THROWS_AS(window_dual(weighted_system(), w), std::domain_error);
}

TEST_CASE("exact inverse square roots") {
  // branch-norm path: {2 theta_1, theta_2} -> {theta_1, theta_2}
  GeneratorSet fixed = s_inv_sqrt_window(weighted_system());
  GeneratorSet koz = kozyrev_generators(3);
  REQUIRE(fixed.generators.size() == 2);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(equal_as_functions(fixed.generators[i], koz.generators[i]));

  // tight path through the half-power sector: doubled system at p = 2
  GeneratorSet dbl2 = doubled_generators(kozyrev_generators(2));
  GeneratorSet par2 = s_inv_sqrt_window(dbl2);
  CHECK(verify_parseval(par2, corpus_generate(2, 3, 6)).verified);

  // lambda = 2 at p = 3 leaves the scalar ring
  CHECK_THROWS_AS(s_inv_sqrt_window(doubled_generators(kozyrev_generators(3))),
                  std::domain_error);
}

TEST_CASE("numeric inverse square root meets its tolerance") {
  WindowSpace w = make_window(3, 0, -1);
  GeneratorSet dbl = doubled_generators(kozyrev_generators(3));
  GeneratorSet par = s_inv_sqrt_window(dbl, w, 40);
  double tol = std::ldexp(1.0, -40);
  auto corpus = corpus_generate(3, 9, 6);
  for (const PFunction& g : corpus) {
    double ratio = sum_squares(g, par).approx_abs() / norm2(g).approx_abs();
    CHECK(std::fabs(ratio - 1) <= tol);
  }
  CHECK_THROWS_AS(s_inv_sqrt_window(dbl, w, 23), std::invalid_argument);
  CHECK_THROWS_AS(s_inv_sqrt_window(dbl, w, 45), std::invalid_argument);
  CHECK_THROWS_AS(s_inv_sqrt_window(weighted_system(), w, 40),
                  std::domain_error);
}
