#include <algorithm>
#include <vector>

#include "doctest.h"
#include "qpframe/corpus.hpp"
#include "qpframe/frame.hpp"

using namespace qpframe;

namespace {

PFunction unit_ball_indicator(long p) {
  std::vector<Atom> atoms;
  atoms.emplace_back(CycScalar::one(p), PadicRational(p),
                     Ball(0, PadicRational(p)));
  return PFunction(p, std::move(atoms));
}

GeneratorSet weighted_system() {
  GeneratorSet g = kozyrev_generators(3);
  g.generators[0] = g.generators[0].scaled(CycScalar(3, Rational(2)));
  g.label = "weighted";
  return g;
}

CoefficientTable kernel_table(const GeneratorSet& doubled, long long j,
                              const PadicRational& a, const CycScalar& c) {
  auto half = static_cast<long>(doubled.generators.size() / 2);
  CoefficientTable t;
  t.p = doubled.p;
  t.entries.emplace(FrameIndex{0, j, a}, c);
  t.entries.emplace(FrameIndex{half, j, a}, -c);
  return t;
}

}  // namespace

TEST_CASE("generator families have the advertised shape") {
  for (long p : {2L, 3L, 5L}) {
    GeneratorSet koz = kozyrev_generators(p);
    CHECK(koz.generators.size() == static_cast<std::size_t>(p - 1));
    for (const PFunction& g : koz.generators) {
      CHECK(g.integrate().is_zero());
      CHECK(norm2(g) == CycScalar::one(p));
      REQUIRE(g.atoms().size() == 1);
      CHECK(g.atoms()[0].support == Ball(0, PadicRational(p)));
    }
  }
  CHECK(ks_generators(3, 2).generators.size() == 6);
  CHECK(ks_generators(2, 3).generators.size() == 4);
  CHECK(ks_generators(5, 1).generators.size() == 4);
  CHECK(doubled_generators(kozyrev_generators(3)).generators.size() == 4);
}

TEST_CASE("analyzing a generator gives a delta table") {
  GeneratorSet koz = kozyrev_generators(3);
  CoefficientTable t = analyze(koz.generators[0], koz);
  REQUIRE(t.entries.size() == 1);
  const auto& [idx, coeff] = *t.entries.begin();
  CHECK(idx.l == 0);
  CHECK(idx.j == 0);
  CHECK(idx.a.is_zero());
  CHECK(coeff == CycScalar::one(3));
  CHECK(!t.tail);
  CHECK(!t.truncated);
}

TEST_CASE("flagship: unit ball against the wavelet system sums to one") {
  for (long p : {2L, 3L, 5L}) {
    CoefficientTable t = analyze(unit_ball_indicator(p), kozyrev_generators(p));
    REQUIRE(t.tail.has_value());
    CHECK(t.sum_abs2() == CycScalar::one(p));
    CHECK(sum_squares(unit_ball_indicator(p), kozyrev_generators(p)) ==
          CycScalar::one(p));
  }
}

TEST_CASE("parseval holds exactly on random corpora") {
  for (long p : {2L, 3L, 5L}) {
    GeneratorSet koz = kozyrev_generators(p);
    auto corpus = corpus_generate(p, 120 + static_cast<std::uint64_t>(p), 10);
    BoundsReport rep = verify_parseval(koz, corpus);
    CHECK(rep.verified);
    CHECK(*rep.min_ratio == Rational(1));
    CHECK(*rep.max_ratio == Rational(1));
  }
  for (auto [p, m] : {std::pair<long, long long>{3, 2}, {2, 3}}) {
    auto corpus = corpus_generate(p, 7, 8);
    CHECK(verify_parseval(ks_generators(p, m), corpus).verified);
  }
}

TEST_CASE("adjointness of analysis and synthesis") {
  long p = 3;
  GeneratorSet koz = kozyrev_generators(p);
  SplitMix64 rng(88);
  for (int i = 0; i < 10; ++i) {
    PFunction g = random_test_function(p, rng);
    // random finite table on a few indices
    CoefficientTable c;
    c.p = p;
    for (int k = 0; k < 3; ++k) {
      FrameIndex idx{static_cast<long>(rng.below(koz.generators.size())),
                     static_cast<long long>(rng.below(4)) - 2,
                     PadicRational(p, Integer(rng.below(9)), -2)};
      c.entries.insert_or_assign(
          idx, CycScalar(p, Rational(static_cast<long>(rng.below(9)) - 4,
                                     1 + static_cast<long>(rng.below(4)))));
    }
    CycScalar lhs = inner_product(synthesize(c, koz), g);
    CoefficientTable cg = analyze(g, koz);
    CycScalar rhs(p);
    for (const auto& [idx, coeff] : c.entries) {
      auto it = cg.entries.find(idx);
      if (it != cg.entries.end()) {
        rhs += coeff * it->second.conjugate();
      } else if (cg.tail && idx.j < cg.tail->j_min) {
        // below the window the analysis obeys the coarse law p^{j/2} t
        for (const auto& term : cg.tail->terms)
          if (term.l == idx.l && term.a == idx.a)
            rhs += coeff *
                   (term.t * CycScalar::half_power(p, idx.j)).conjugate();
      }
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("weighted system bounds and witnesses") {
  GeneratorSet w = weighted_system();
  auto corpus = corpus_generate(3, 19, 10);
  corpus.push_back(kozyrev_generators(3).generators[0]);
  corpus.push_back(kozyrev_generators(3).generators[1]);
  FrameBounds claimed;
  claimed.a = Rational(1);
  claimed.b = Rational(4);
  BoundsReport rep = verify_frame_bounds(w, corpus, claimed);
  CHECK(rep.verified);
  // the two wavelet directions attain the ends of the observed range
  CHECK(sum_squares(corpus[10], w) == CycScalar(3, Rational(4)));
  CHECK(sum_squares(corpus[11], w) == CycScalar::one(3));
  // a tighter claim fails with a witness
  FrameBounds wrong;
  wrong.a = Rational(2);
  wrong.b = Rational(4);
  BoundsReport bad = verify_frame_bounds(w, corpus, wrong);
  CHECK(!bad.verified);
  CHECK(!bad.witness.empty());
}

TEST_CASE("canonical duals: tight, diagonal, reciprocity, involution") {
  long p = 3;
  GeneratorSet koz = kozyrev_generators(p);
  GeneratorSet dual0 = canonical_dual(koz, DualMethod::Auto);
  REQUIRE(dual0.generators.size() == koz.generators.size());
  for (std::size_t i = 0; i < koz.generators.size(); ++i)
    CHECK(equal_as_functions(dual0.generators[i], koz.generators[i]));

  GeneratorSet dbl = doubled_generators(koz);
  GeneratorSet dbl_dual = canonical_dual(dbl, DualMethod::Tight);
  for (std::size_t i = 0; i < dbl.generators.size(); ++i)
    CHECK(equal_as_functions(
        dbl_dual.generators[i],
        dbl.generators[i].scaled(CycScalar(p, Rational(1, 2)))));

  GeneratorSet w = weighted_system();
  GeneratorSet wd = canonical_dual(w, DualMethod::Diagonal);
  CHECK(equal_as_functions(
      wd.generators[0],
      koz.generators[0].scaled(CycScalar(p, Rational(1, 2)))));
  CHECK(equal_as_functions(wd.generators[1], koz.generators[1]));

  // dual of the dual restores the system
  GeneratorSet wdd = canonical_dual(wd, DualMethod::Diagonal);
  for (std::size_t i = 0; i < w.generators.size(); ++i)
    CHECK(equal_as_functions(wdd.generators[i], w.generators[i]));

  // reciprocity: dual bounds are (1/B, 1/A)
  auto corpus = corpus_generate(3, 23, 8);
  corpus.push_back(koz.generators[0]);
  corpus.push_back(koz.generators[1]);
  FrameBounds recip;
  recip.a = Rational(1, 4);
  recip.b = Rational(1);
  CHECK(verify_frame_bounds(wd, corpus, recip).verified);
}

TEST_CASE("frame operator is self-adjoint and positive") {
  // weighted shells have non-constant weights, so S g is a finite function
  // only for zero-mean g; kozyrev resums any mean.
  GeneratorSet w = weighted_system();
  SplitMix64 rng(31);
  for (int i = 0; i < 6; ++i) {
    PFunction g = random_test_function(3, rng, /*zero_mean=*/true);
    PFunction h = random_test_function(3, rng, /*zero_mean=*/true);
    PFunction sg = frame_operator_apply(g, w);
    PFunction sh = frame_operator_apply(h, w);
    CHECK(inner_product(sg, h) == inner_product(g, sh));
    CycScalar quad = inner_product(sg, g);
    CHECK(quad == sum_squares(g, w));
    CHECK(quad.sign_real() == 1);
  }
  GeneratorSet koz = kozyrev_generators(3);
  for (int i = 0; i < 4; ++i) {
    PFunction g = random_test_function(3, rng);
    PFunction sg = frame_operator_apply(g, koz);
    CHECK(equal_as_functions(sg, g));  // Parseval: S = Id even off zero-mean
  }
}

TEST_CASE("decomposition reconstructs in both orders") {
  for (const GeneratorSet& gens :
       {weighted_system(), doubled_generators(kozyrev_generators(3))}) {
    SplitMix64 rng(61);
    for (int i = 0; i < 8; ++i) {
      PFunction g = random_test_function(3, rng);
      Decomposition d = decompose_reconstruct(g, gens);
      CHECK(d.primal_ok);
      CHECK(d.dual_ok);
      CHECK(d.orders_agree);
      CHECK(equal_as_functions(d.reconstruction, g));
    }
  }
}

TEST_CASE("redundant system minus one element still frames") {
  long p = 3;
  GeneratorSet dbl = doubled_generators(kozyrev_generators(p));
  // drop f_{0,0,0}: sandwich with (1, 2) survives (spec of redundancy)
  FrameIndex dropped{0, 0, PadicRational(p)};
  SplitMix64 rng(71);
  for (int i = 0; i < 8; ++i) {
    PFunction g = random_test_function(p, rng);
    CycScalar sigma = sum_squares(g, dbl);
    CoefficientTable t = analyze(g, dbl);
    auto it = t.entries.find(dropped);
    if (it != t.entries.end()) sigma -= it->second.abs2();
    CycScalar nu = norm2(g);
    CHECK((sigma - nu).sign_real() >= 0);
    CHECK((nu.scaled(Rational(2)) - sigma).sign_real() >= 0);
  }
}

TEST_CASE("minimal-norm pythagoras, including the closed-form example") {
  long p = 2;
  GeneratorSet dbl = doubled_generators(kozyrev_generators(p));
  PFunction theta = dbl.generators[0];
  CoefficientTable alt;
  alt.p = p;
  alt.entries.emplace(FrameIndex{0, 0, PadicRational(p)}, CycScalar::one(p));
  MinimalNormReport rep = minimal_norm_identity(theta, dbl, alt);
  CHECK(rep.pythagoras);
  CHECK(rep.alt_sum == CycScalar::one(p));
  CHECK(rep.canonical_sum == CycScalar(p, Rational(1, 2)));
  CHECK(rep.residual_sum == CycScalar(p, Rational(1, 2)));

  GeneratorSet dbl3 = doubled_generators(kozyrev_generators(3));
  GeneratorSet dual3 = canonical_dual(dbl3, DualMethod::Auto);
  SplitMix64 rng(81);
  for (int i = 0; i < 6; ++i) {
    PFunction g = random_test_function(3, rng, /*zero_mean=*/true);
    CoefficientTable alt3 = analyze(g, dual3);
    if (!alt3.entries.empty()) {
      auto [idx, c] = *alt3.entries.begin();
      CycScalar bump(3, Rational(1 + static_cast<long>(rng.below(3))));
      FrameIndex other{idx.l < 2 ? idx.l + 2 : idx.l - 2, idx.j, idx.a};
      alt3.entries.insert_or_assign(idx, c + bump);
      auto it = alt3.entries.find(other);
      if (it == alt3.entries.end())
        alt3.entries.emplace(other, -bump);
      else
        it->second = it->second - bump;
    }
    MinimalNormReport r3 = minimal_norm_identity(g, dbl3, alt3);
    CHECK(r3.pythagoras);
  }
}

TEST_CASE("range projection fixes images and kills kernels") {
  long p = 3;
  GeneratorSet dbl = doubled_generators(kozyrev_generators(p));
  SplitMix64 rng(91);
  for (int i = 0; i < 5; ++i) {
    PFunction g = random_test_function(p, rng, /*zero_mean=*/true);
    CoefficientTable image = analyze(g, dbl);
    CoefficientTable once = range_projection(image, dbl);
    CHECK(once.entries == image.entries);
    CoefficientTable twice = range_projection(once, dbl);
    CHECK(twice.entries == once.entries);

    CoefficientTable ker = kernel_table(
        dbl, static_cast<long long>(rng.below(3)) - 1,
        PadicRational(p, Integer(rng.below(3)), -1),
        CycScalar(p, Rational(1 + static_cast<long>(rng.below(5)))));
    CHECK(synthesize(ker, dbl).is_zero());
    CHECK(range_projection(ker, dbl).entries.empty());

    // image + kernel projects back to the image
    CoefficientTable mixed = image;
    for (const auto& [idx, c] : ker.entries) {
      auto it = mixed.entries.find(idx);
      if (it == mixed.entries.end())
        mixed.entries.emplace(idx, c);
      else
        it->second = it->second + c;
    }
    CHECK(range_projection(mixed, dbl).entries == image.entries);
  }
}

TEST_CASE("unitary transport preserves the coefficient law") {
  long p = 3;
  auto corpus = corpus_generate(p, 141, 6);
  std::vector<Unitary> us;
  us.push_back({Unitary::Kind::Translate, PadicRational::parse(p, "1/9"), 0});
  us.push_back({Unitary::Kind::Modulate, PadicRational::parse(p, "1/3"), 0});
  us.push_back({Unitary::Kind::Dilate, PadicRational(p), 1});
  for (const GeneratorSet& gens : {kozyrev_generators(p), weighted_system()})
    for (const Unitary& u : us) {
      TransportReport rep = unitary_transport_check(gens, corpus, u);
      CHECK(rep.verified);
      CHECK(rep.witness.empty());
    }
}

TEST_CASE("element norms are bounded by the upper frame bound") {
  GeneratorSet w = weighted_system();
  FrameBounds b;
  b.a = Rational(1);
  b.b = Rational(4);
  std::vector<FrameIndex> idx;
  idx.push_back({0, 0, PadicRational(3)});
  idx.push_back({0, -2, PadicRational::parse(3, "1/3")});
  idx.push_back({1, 3, PadicRational::parse(3, "2/9")});
  ElementBoundReport rep = element_norm_bound_check(w, b, idx);
  CHECK(rep.verified);
  FrameBounds tight;
  tight.a = Rational(1);
  tight.b = Rational(2);
  CHECK(!element_norm_bound_check(w, tight, idx).verified);
}

TEST_CASE("geometric tail is invariant under window widening") {
  long p = 3;
  GeneratorSet koz = kozyrev_generators(p);
  SplitMix64 rng(101);
  int tested = 0;
  while (tested < 6) {
    PFunction g = random_test_function(p, rng);
    if (g.integrate().is_zero()) continue;
    CoefficientTable t0 = analyze(g, koz);
    REQUIRE(t0.tail.has_value());
    AnalysisOptions opts;
    opts.force_j_min = t0.tail->j_min - 5;
    CoefficientTable t1 = analyze(g, koz, opts);
    REQUIRE(t1.tail.has_value());
    CHECK(t1.tail->j_min == t0.tail->j_min - 5);
    CHECK(t0.sum_abs2() == t1.sum_abs2());
    ++tested;
  }
}

TEST_CASE("nonzero-mean generators demand explicit truncation") {
  long p = 3;
  GeneratorSet bad;
  bad.p = p;
  bad.label = "mean";
  bad.generators.push_back(unit_ball_indicator(p));
  PFunction g = unit_ball_indicator(p);
  CHECK_THROWS_AS(analyze(g, bad), std::domain_error);
  AnalysisOptions opts;
  opts.allow_truncation = true;
  CoefficientTable t = analyze(g, bad, opts);
  CHECK(t.truncated);
}

TEST_CASE("rescaling to parseval") {
  long p = 3;
  GeneratorSet two;
  two.p = p;
  two.label = "two";
  for (const PFunction& g : kozyrev_generators(p).generators)
    two.generators.push_back(g.scaled(CycScalar(p, Rational(2))));
  GeneratorSet fixed = rescale_to_parseval(two, Rational(4));
  for (std::size_t i = 0; i < fixed.generators.size(); ++i)
    CHECK(equal_as_functions(fixed.generators[i],
                             kozyrev_generators(p).generators[i]));

  GeneratorSet same = rescale_to_parseval(kozyrev_generators(p), Rational(1));
  for (std::size_t i = 0; i < same.generators.size(); ++i)
    CHECK(equal_as_functions(same.generators[i],
                             kozyrev_generators(p).generators[i]));

  // A = p folds through the half-power sector
  GeneratorSet root;
  root.p = p;
  root.label = "root";
  for (const PFunction& g : kozyrev_generators(p).generators)
    root.generators.push_back(g.scaled(CycScalar::half_power(p, 1)));
  GeneratorSet back = rescale_to_parseval(root, Rational(p));
  CHECK(verify_parseval(back, corpus_generate(p, 5, 5)).verified);

  // A = 2 at p = 3 has no exact scalar square root
  GeneratorSet dbl = doubled_generators(kozyrev_generators(p));
  CHECK_THROWS_AS(rescale_to_parseval(dbl, Rational(2)), std::domain_error);
}

TEST_CASE("support enumeration brackets the analysis") {
  long p = 3;
  GeneratorSet koz = kozyrev_generators(p);
  SplitMix64 rng(111);
  for (int i = 0; i < 8; ++i) {
    PFunction g = random_test_function(p, rng);
    SupportEnumeration e = enumerate_support(g, koz);
    CoefficientTable t = analyze(g, koz);
    for (const auto& [idx, c] : t.entries) {
      CHECK(idx.j >= e.j_min);
      CHECK(idx.j <= e.j_max);
      CHECK(std::find(e.indices.begin(), e.indices.end(), idx) !=
            e.indices.end());
    }
    CHECK(e.tail.has_value() == t.tail.has_value());
  }
}
