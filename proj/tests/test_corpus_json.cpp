#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qpframe/corpus.hpp"
#include "qpframe/frame.hpp"
#include "qpframe/framelet_set.hpp"
#include "qpframe/json_io.hpp"

using namespace qpframe;

namespace {

PFunction unit_ball_indicator(long p) {
  std::vector<Atom> atoms;
  atoms.emplace_back(CycScalar::one(p), PadicRational(p),
                     Ball(0, PadicRational(p)));
  return PFunction(p, std::move(atoms));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(bool(in), "missing golden file ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
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

TEST_CASE("corpus generation is deterministic") {
  for (long p : {2L, 3L, 5L}) {
    auto a = corpus_generate(p, 7, 12);
    auto b = corpus_generate(p, 7, 12);
    CHECK(corpus_to_json(a) == corpus_to_json(b));
    auto c = corpus_generate(p, 8, 12);
    CHECK(corpus_to_json(a) != corpus_to_json(c));
    for (const PFunction& f : a) CHECK(!f.is_zero());
    for (const PFunction& f : corpus_generate(p, 7, 12, true))
      CHECK(f.integrate().is_zero());
  }
  CHECK_THROWS_AS(corpus_generate(3, 1, 0), std::invalid_argument);
}

TEST_CASE("corpus bytes match the golden file") {
  std::string golden =
      read_file(std::string(QPFRAME_GOLDEN_DIR) + "/corpus_p3_seed7_n3.json");
  // strip one trailing newline if the file has one
  if (!golden.empty() && golden.back() == '\n') golden.pop_back();
  CHECK(corpus_to_json(corpus_generate(3, 7, 3)) == golden);
}

TEST_CASE("function serialization round trips byte-identically") {
  for (long p : {2L, 3L, 5L}) {
    SplitMix64 rng(200 + static_cast<std::uint64_t>(p));
    for (int i = 0; i < 10; ++i) {
      PFunction f = random_test_function(p, rng);
      std::string text = to_json(f);
      PFunction back = pfunction_from_json(text);
      CHECK(same_atoms(back, f));
      CHECK(to_json(back) == text);
    }
  }
}

TEST_CASE("the unit field of a point is a string") {
  std::string text = to_json(PadicRational::parse(3, "2/9"));
  CHECK(text == R"({"u":"2","v":-2})");
  CHECK(to_json(PadicRational(3)) == R"({"u":"0","v":0})");
  CHECK(padic_from_json(text, 3) == PadicRational::parse(3, "2/9"));
  CHECK_THROWS_WITH_AS(padic_from_json(R"({"u":2,"v":0})", 3),
                       doctest::Contains("'u'"), std::runtime_error);
  CHECK_THROWS_WITH_AS(padic_from_json(R"({"v":0})", 3),
                       doctest::Contains("'u'"), std::runtime_error);
}

TEST_CASE("generator sets and multiframelet sets round trip") {
  GeneratorSet koz = kozyrev_generators(3);
  GeneratorSet back = generator_set_from_json(to_json(koz));
  CHECK(back.p == koz.p);
  CHECK(back.label == koz.label);
  REQUIRE(back.generators.size() == koz.generators.size());
  for (std::size_t i = 0; i < koz.generators.size(); ++i)
    CHECK(same_atoms(back.generators[i], koz.generators[i]));

  MultiframeletSet s = example_set(5);
  MultiframeletSet sback = set_from_json(to_json(s));
  CHECK(to_json(sback) == to_json(s));
  CHECK_THROWS_WITH_AS(
      set_from_json(R"({"p":3,"parts":[{"balls":[]}]})"),
      doctest::Contains("part"), std::runtime_error);
}

TEST_CASE("coefficient tables round trip and mark generators 1-based") {
  GeneratorSet koz = kozyrev_generators(3);
  CoefficientTable t = analyze(koz.generators[1], koz);
  std::string text = to_json(t);
  CHECK(text.find("\"l\":2") != std::string::npos);
  CHECK(text.find("\"tail\":null") != std::string::npos);
  CoefficientTable back = table_from_json(text);
  CHECK(back.p == t.p);
  CHECK(back.entries == t.entries);
  CHECK(to_json(back) == text);

  // a table with a tail exports masses but refuses re-import
  CoefficientTable flag = analyze(unit_ball_indicator(3), koz);
  std::string flagged = to_json(flag);
  CHECK(flagged.find("\"j_min\":") != std::string::npos);
  CHECK(flagged.find("\"m\":") != std::string::npos);
  CHECK_THROWS_WITH_AS(table_from_json(flagged), doctest::Contains("tail"),
                       std::runtime_error);
}

TEST_CASE("csv export evaluates entries at 53 bits") {
  GeneratorSet koz = kozyrev_generators(3);
  CoefficientTable t = analyze(koz.generators[0], koz);
  CHECK(table_to_csv(t) == "l,j,a,coeff_re,coeff_im,abs2\n1,0,0,1,0,1\n");
}

TEST_CASE("malformed documents name the offending field") {
  CHECK_THROWS_WITH_AS(pfunction_from_json("{"),
                       doctest::Contains("malformed"), std::runtime_error);
  CHECK_THROWS_WITH_AS(pfunction_from_json(R"({"atoms":[]})"),
                       doctest::Contains("'p'"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      pfunction_from_json(
          R"({"p":3,"atoms":[{"coeff":{"terms":[]},"b":{"u":"0","v":0}}]})"),
      doctest::Contains("'ball'"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      pfunction_from_json(
          R"({"p":3,"atoms":[{"coeff":{"terms":[{"q":"1/0","h":0,"r":"0"}]},)"
          R"("b":{"u":"0","v":0},"ball":{"gamma":0,"center":{"u":"0","v":0}}}]})"),
      doctest::Contains("'q'"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      table_from_json(R"({"p":3,"entries":[{"l":0,"j":0,)"
                      R"("a":{"u":"0","v":0},"coeff":{"terms":[]}}]})"),
      doctest::Contains("'l'"), std::runtime_error);
}
