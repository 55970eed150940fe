#include "doctest.h"
#include "qpframe/corpus.hpp"
#include "qpframe/fourier.hpp"
#include "qpframe/framelet_set.hpp"

using namespace qpframe;

namespace {

PFunction unit_ball_indicator(long p) {
  std::vector<Atom> atoms;
  atoms.emplace_back(CycScalar::one(p), PadicRational(p),
                     Ball(0, PadicRational(p)));
  return PFunction(p, std::move(atoms));
}

bool same_atoms(const PFunction& f, const PFunction& g) {
  if (f.atoms().size() != g.atoms().size()) return false;
  for (std::size_t i = 0; i < f.atoms().size(); ++i) {
    const Atom& a = f.atoms()[i];
    const Atom& b = g.atoms()[i];
    if (!(a.coeff == b.coeff) || !(a.modulation == b.modulation) ||
        !(a.support == b.support))
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("the example set reproduces the wavelet system") {
  for (long p : {2L, 3L, 5L}) {
    MultiframeletSet s = example_set(p);
    REQUIRE(s.parts.size() == static_cast<std::size_t>(p - 1));
    GeneratorSet gens = generators_from_set(s);
    GeneratorSet koz = kozyrev_generators(p);
    REQUIRE(gens.generators.size() == koz.generators.size());
    for (std::size_t i = 0; i < gens.generators.size(); ++i)
      CHECK(same_atoms(gens.generators[i], koz.generators[i]));
  }
  // p = 3 centers: -1/3 and -2/3 canonicalize to 2/3 and 1/3
  MultiframeletSet s3 = example_set(3);
  CHECK(s3.parts[0].balls[0] ==
        Ball(0, PadicRational::parse(3, "2/3")));
  CHECK(s3.parts[1].balls[0] ==
        Ball(0, PadicRational::parse(3, "1/3")));
}

TEST_CASE("generators round trip through the transform") {
  MultiframeletSet s = example_set(3);
  GeneratorSet gens = generators_from_set(s);
  for (std::size_t l = 0; l < gens.generators.size(); ++l)
    CHECK(equal_as_functions(fourier(gens.generators[l]),
                             s.parts[l].indicator()));
}

TEST_CASE("ball unions validate and coarsen") {
  long p = 3;
  Ball zp(0, PadicRational(p));
  CHECK_THROWS_AS(
      make_ball_union(p, {zp, Ball(-1, PadicRational(p))}),
      std::invalid_argument);

  auto kids = zp.children();
  BallUnionSet merged = make_ball_union(p, {kids[0], kids[2], kids[1]});
  REQUIRE(merged.balls.size() == 1);
  CHECK(merged.balls[0] == zp);
  CHECK(merged.measure() == Rational(1));

  BallUnionSet partial =
      make_ball_union(p, {kids[0], kids[2]});
  CHECK(partial.balls.size() == 2);
  CHECK(partial.measure() == Rational(2, 3));

  BallUnionSet kept = make_ball_union(p, {kids[0], kids[2], kids[1]}, false);
  CHECK(kept.balls.size() == 3);
  CHECK(kept.contains(PadicRational(p, 2L)));
}

TEST_CASE("multiframelet sets demand disjoint nonempty parts") {
  long p = 3;
  BallUnionSet a = make_ball_union(p, {Ball(0, PadicRational(p))});
  BallUnionSet b =
      make_ball_union(p, {Ball(-1, PadicRational(p, Integer(1), 0))});
  CHECK_THROWS_AS(make_multiframelet_set(p, {a, b}), std::invalid_argument);
  CHECK_THROWS_AS(make_multiframelet_set(p, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_multiframelet_set(p, {BallUnionSet{p, {}}}),
                  std::invalid_argument);
}

TEST_CASE("set verification on parseval and non-parseval sets") {
  auto corpus3 = corpus_generate(3, 77, 8);
  SetVerification ok = verify_multiframelet_set(example_set(3), corpus3);
  CHECK(ok.parseval_consistent);
  CHECK(!ok.truncated);
  CHECK(ok.bounds.verified);

  // single part {B_0(-1/2)} at p = 2 is the full wavelet set
  MultiframeletSet half = make_multiframelet_set(
      2, {make_ball_union(2, {Ball(0, PadicRational(2, Integer(1), -1))})});
  CHECK(verify_multiframelet_set(half, corpus_generate(2, 78, 8))
            .parseval_consistent);

  // {Z_p} is not a wavelet set: its generator has nonzero mean
  MultiframeletSet zp = make_multiframelet_set(
      3, {make_ball_union(3, {Ball(0, PadicRational(3))})});
  CHECK_THROWS_AS(verify_multiframelet_set(zp, corpus3), std::domain_error);
  SetVerification trunc = verify_multiframelet_set(zp, corpus3, true);
  CHECK(trunc.truncated);
  CHECK(!trunc.parseval_consistent);
  CHECK(!trunc.witness.empty());
}

TEST_CASE("norm identity on closed-form and random inputs") {
  MultiframeletSet s3 = example_set(3);
  NormIdentityReport flag = norm_identity_check(unit_ball_indicator(3), s3);
  CHECK(flag.equal);
  CHECK(flag.lhs == CycScalar::one(3));
  CHECK(flag.rhs == CycScalar::one(3));

  PFunction theta1 = generators_from_set(s3).generators[0];
  NormIdentityReport single = norm_identity_check(theta1, s3);
  CHECK(single.equal);
  CHECK(single.lhs == CycScalar::one(3));

  NormIdentityReport zero = norm_identity_check(PFunction(3), s3);
  CHECK(zero.equal);
  CHECK(zero.lhs.is_zero());
  CHECK(zero.rhs.is_zero());

  for (long p : {2L, 3L}) {
    MultiframeletSet s = example_set(p);
    SplitMix64 rng(600 + static_cast<std::uint64_t>(p));
    for (int i = 0; i < 8; ++i) {
      PFunction g = random_test_function(p, rng);
      NormIdentityReport rep = norm_identity_check(g, s);
      CHECK(rep.equal);
      CHECK(rep.lhs == norm2(g));
    }
  }

  // a strict subset of the wavelet set is not Parseval-consistent
  MultiframeletSet partial = make_multiframelet_set(
      3, {make_ball_union(3, {Ball(0, PadicRational(3, Integer(2), -1))})});
  CHECK_THROWS_AS(norm_identity_check(unit_ball_indicator(3), partial),
                  std::domain_error);
}

TEST_CASE("set topology") {
  for (long p : {2L, 3L, 5L}) {
    SetTopology t = set_topology(example_set(p));
    CHECK(t.open);
    CHECK(t.compact);
    CHECK(!t.connected);
  }
}
