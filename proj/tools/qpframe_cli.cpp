#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpframe/corpus.hpp"
#include "qpframe/fourier.hpp"
#include "qpframe/frame.hpp"
#include "qpframe/framelet_set.hpp"
#include "qpframe/json_io.hpp"
#include "qpframe/window.hpp"

namespace {

using njson = nlohmann::ordered_json;
using namespace qpframe;

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open output file: " + out);
  f << text << "\n";
}

Rational rational_arg(const std::string& s, const char* name) {
  Rational q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0 || q.get_den() == 0)
    throw std::runtime_error(std::string("option ") + name +
                             " expects a rational like 3/4");
  q.canonicalize();
  return q;
}

struct GensOpts {
  std::string spec = "kozyrev";
  long long ks_m = 2;
};

void add_gens_options(CLI::App* cmd, GensOpts& o) {
  cmd->add_option("--gens", o.spec,
                  "generator system: kozyrev | ks | kozyrev-doubled | "
                  "weighted | set:FILE | FILE.json");
  cmd->add_option("--ks-m", o.ks_m, "order m for --gens ks (default 2)");
}

GeneratorSet resolve_gens(long p, const GensOpts& o) {
  if (o.spec == "kozyrev") return kozyrev_generators(p);
  if (o.spec == "ks") return ks_generators(p, o.ks_m);
  if (o.spec == "kozyrev-doubled")
    return doubled_generators(kozyrev_generators(p));
  if (o.spec == "weighted") {
    GeneratorSet g = kozyrev_generators(p);
    g.generators[0] = g.generators[0].scaled(CycScalar(p, Rational(2)));
    g.label = "weighted";
    return g;
  }
  if (o.spec.rfind("set:", 0) == 0)
    return generators_from_set(set_from_json(read_all(o.spec.substr(4))));
  GeneratorSet g = generator_set_from_json(read_all(o.spec));
  if (g.p != p)
    throw std::runtime_error("generator file prime disagrees with -p");
  return g;
}

struct CorpusOpts {
  std::uint64_t seed = 1;
  long long size = 20;
  bool zero_mean = false;
  bool unit_ball_only = false;
  std::string file;
};

void add_corpus_options(CLI::App* cmd, CorpusOpts& o) {
  cmd->add_option("--seed", o.seed, "corpus seed (default 1)");
  cmd->add_option("--corpus-size", o.size, "corpus size (default 20)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--zero-mean", o.zero_mean,
                "restrict the corpus to zero-mean functions");
  cmd->add_flag("--unit-ball-only", o.unit_ball_only,
                "use the single function 1_{Z_p} as the corpus");
  cmd->add_option("--corpus", o.file, "read the corpus from a JSON file");
}

std::vector<PFunction> resolve_corpus(long p, const CorpusOpts& o) {
  if (!o.file.empty()) return corpus_from_json(read_all(o.file));
  if (o.unit_ball_only) {
    std::vector<Atom> atoms;
    atoms.emplace_back(CycScalar::one(p), PadicRational(p),
                       Ball(0, PadicRational(p)));
    return {PFunction(p, std::move(atoms))};
  }
  return corpus_generate(p, o.seed, static_cast<std::size_t>(o.size),
                         o.zero_mean);
}

int g_rc = 0;

void finish_report(bool verified, njson report, const std::string& out) {
  report["verified"] = verified;
  emit(report.dump(), out);
  if (!verified) g_rc = 2;
}

njson ratio_field(const BoundsReport& rep) {
  njson j;
  if (rep.min_ratio) j["min"] = rep.min_ratio->get_str();
  if (rep.max_ratio) j["max"] = rep.max_ratio->get_str();
  return j;
}

// Parseval-style checks certify every ratio equal to 1; collapse the field.
njson parseval_ratios(const BoundsReport& rep) {
  if (rep.verified) return "all exactly 1";
  return ratio_field(rep);
}

bool tables_equal(const CoefficientTable& a, const CoefficientTable& b) {
  if (a.entries.size() != b.entries.size()) return false;
  auto it = b.entries.begin();
  for (const auto& [idx, c] : a.entries) {
    if (!(idx == it->first) || !(c == it->second)) return false;
    ++it;
  }
  return !a.tail && !b.tail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact multiframelet analysis on L2(Q_p)"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out;
  app.add_option("--out", out, "write the result document here (default stdout)");

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "emit a generator system");
  gen->require_subcommand(1);
  long gen_p = 3;
  long long gen_m = 2;
  std::string gen_set_file;

  auto* gen_koz = gen->add_subcommand("kozyrev", "wavelet generators theta_k");
  gen_koz->add_option("-p,--prime", gen_p, "prime")->required();
  gen_koz->callback(
      [&] { emit(to_json(kozyrev_generators(gen_p)), out); });

  auto* gen_ks = gen->add_subcommand("ks", "order-m generator family");
  gen_ks->add_option("-p,--prime", gen_p, "prime")->required();
  gen_ks->add_option("-m,--order", gen_m, "order m >= 1")->required();
  gen_ks->callback([&] { emit(to_json(ks_generators(gen_p, gen_m)), out); });

  auto* gen_fs = gen->add_subcommand(
      "from-set", "inverse transforms of set-part indicators");
  gen_fs->add_option("--set", gen_set_file, "MultiframeletSet JSON file")
      ->required();
  gen_fs->callback([&] {
    emit(to_json(generators_from_set(set_from_json(read_all(gen_set_file)))),
         out);
  });

  // ---- analyze ----
  auto* an = app.add_subcommand("analyze", "coefficient table of a function");
  long an_p = 3;
  GensOpts an_gens;
  std::string an_input = "-";
  std::string an_format = "json";
  long long an_jmin = 0, an_jmax = 0;
  bool an_have_jmin = false, an_have_jmax = false;
  bool an_truncate = false;
  an->add_option("-p,--prime", an_p, "prime")->required();
  add_gens_options(an, an_gens);
  an->add_option("--input", an_input, "PFunction JSON file or - for stdin");
  an->add_option("--format", an_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  an->add_option("--j-min", an_jmin, "widen the scale window downward")
      ->each([&](const std::string&) { an_have_jmin = true; });
  an->add_option("--j-max", an_jmax, "widen the scale window upward")
      ->each([&](const std::string&) { an_have_jmax = true; });
  an->add_flag("--allow-truncation", an_truncate,
               "permit nonzero-mean generators; the table is then cut at "
               "the window edge");
  an->callback([&] {
    PFunction g = pfunction_from_json(read_all(an_input));
    if (g.prime() != an_p)
      throw std::runtime_error("input prime disagrees with -p");
    AnalysisOptions opts;
    if (an_have_jmin) opts.force_j_min = an_jmin;
    if (an_have_jmax) opts.force_j_max = an_jmax;
    opts.allow_truncation = an_truncate;
    CoefficientTable t = analyze(g, resolve_gens(an_p, an_gens), opts);
    emit(an_format == "csv" ? table_to_csv(t) : to_json(t), out);
  });

  // ---- synthesize ----
  auto* sy = app.add_subcommand("synthesize",
                                "superpose a coefficient table against a "
                                "generator system");
  long sy_p = 3;
  GensOpts sy_gens;
  std::string sy_table = "-";
  sy->add_option("-p,--prime", sy_p, "prime")->required();
  add_gens_options(sy, sy_gens);
  sy->add_option("--table", sy_table, "CoefficientTable JSON file or -");
  sy->callback([&] {
    CoefficientTable t = table_from_json(read_all(sy_table));
    if (t.p != sy_p) throw std::runtime_error("table prime disagrees with -p");
    emit(to_json(synthesize(t, resolve_gens(sy_p, sy_gens))), out);
  });

  // ---- fourier ----
  auto* fo = app.add_subcommand("fourier", "exact Fourier transform");
  fo->require_subcommand(1);
  std::string fo_input = "-";
  auto* fo_fwd = fo->add_subcommand("fwd", "forward transform");
  fo_fwd->add_option("--input", fo_input, "PFunction JSON file or -");
  fo_fwd->callback(
      [&] { emit(to_json(fourier(pfunction_from_json(read_all(fo_input)))), out); });
  auto* fo_inv = fo->add_subcommand("inv", "inverse transform");
  fo_inv->add_option("--input", fo_input, "PFunction JSON file or -");
  fo_inv->callback([&] {
    emit(to_json(inverse_fourier(pfunction_from_json(read_all(fo_input)))), out);
  });

  // ---- corpus ----
  auto* co = app.add_subcommand("corpus", "deterministic test corpus");
  long co_p = 3;
  std::uint64_t co_seed = 1;
  long long co_size = 20;
  bool co_zero_mean = false;
  co->add_option("-p,--prime", co_p, "prime")->required();
  co->add_option("--seed", co_seed, "seed (default 1)");
  co->add_option("--corpus-size", co_size, "number of functions")
      ->check(CLI::PositiveNumber);
  co->add_flag("--zero-mean", co_zero_mean, "zero-mean functions only");
  co->callback([&] {
    emit(corpus_to_json(corpus_generate(
             co_p, co_seed, static_cast<std::size_t>(co_size), co_zero_mean)),
         out);
  });

  // ---- verify ----
  auto* ve = app.add_subcommand("verify", "exact verification suites");
  ve->require_subcommand(1);
  long ve_p = 3;
  GensOpts ve_gens;
  CorpusOpts ve_corpus;
  std::string ve_set_file;
  std::string ve_lower = "1", ve_upper = "1";
  std::string ve_method = "auto";
  std::string ve_unitary = "translate";
  std::string ve_param = "0";
  long long ve_jshift = 1;
  long long ve_wg = 0, ve_wc = -1;
  bool ve_numeric = false;
  bool ve_sqrt_window = false;
  bool ve_truncate = false;
  bool ve_certify_window = false;
  long long ve_tolerance_bits = 40;

  auto add_common = [&](CLI::App* cmd, bool with_gens = true) {
    cmd->add_option("-p,--prime", ve_p, "prime")->required();
    if (with_gens) add_gens_options(cmd, ve_gens);
    add_corpus_options(cmd, ve_corpus);
  };

  auto* vp = ve->add_subcommand("parseval", "sum of squares == norm squared");
  add_common(vp);
  vp->add_flag("--numeric", ve_numeric,
               "compare ratios in floating point within 2^-tolerance-bits");
  vp->add_flag("--sqrt-window", ve_sqrt_window,
               "first replace the system by its window inverse square root "
               "(requires --numeric)");
  vp->add_option("--tolerance-bits", ve_tolerance_bits,
                 "numeric tolerance exponent, >= 24 (default 40)");
  vp->add_option("--window-g", ve_wg, "window position exponent G");
  vp->add_option("--window-c", ve_wc, "window cell exponent c <= G");
  vp->callback([&] {
    GeneratorSet gens = resolve_gens(ve_p, ve_gens);
    if (ve_sqrt_window) {
      if (!ve_numeric)
        throw std::runtime_error("--sqrt-window requires --numeric");
      gens = s_inv_sqrt_window(gens, make_window(ve_p, ve_wg, ve_wc),
                               static_cast<int>(ve_tolerance_bits));
    }
    auto corpus = resolve_corpus(ve_p, ve_corpus);
    njson rep;
    if (ve_numeric) {
      if (ve_tolerance_bits < 24)
        throw std::runtime_error("--tolerance-bits must be at least 24");
      double tol = std::ldexp(1.0, -static_cast<int>(ve_tolerance_bits));
      bool ok = true;
      std::string witness;
      double worst = 0;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].is_zero()) continue;
        double ratio = sum_squares(corpus[i], gens).approx_abs() /
                       norm2(corpus[i]).approx_abs();
        worst = std::max(worst, std::fabs(ratio - 1));
        if (std::fabs(ratio - 1) > tol && ok) {
          ok = false;
          witness = "corpus member " + std::to_string(i) +
                    ": ratio off by " + std::to_string(ratio - 1);
        }
      }
      rep["mode"] = "numeric";
      rep["max_deviation"] = worst;
      if (!ok) rep["witness"] = witness;
      finish_report(ok, std::move(rep), out);
      return;
    }
    BoundsReport b = verify_parseval(gens, corpus);
    rep["mode"] = "exact";
    rep["ratios"] = parseval_ratios(b);
    if (!b.verified) rep["witness"] = b.witness;
    finish_report(b.verified, std::move(rep), out);
  });

  auto* vb = ve->add_subcommand("bounds", "frame sandwich with claimed A, B");
  add_common(vb);
  vb->add_option("--lower", ve_lower, "claimed lower bound A")->required();
  vb->add_option("--upper", ve_upper, "claimed upper bound B")->required();
  vb->add_flag("--certify-window", ve_certify_window,
               "also certify (A, B) on a window compression");
  vb->add_option("--window-g", ve_wg, "window position exponent G");
  vb->add_option("--window-c", ve_wc, "window cell exponent c <= G");
  vb->callback([&] {
    GeneratorSet gens = resolve_gens(ve_p, ve_gens);
    FrameBounds claimed;
    claimed.a = rational_arg(ve_lower, "--lower");
    claimed.b = rational_arg(ve_upper, "--upper");
    BoundsReport b = verify_frame_bounds(gens, resolve_corpus(ve_p, ve_corpus),
                                         claimed);
    njson rep;
    rep["ratios"] = ratio_field(b);
    bool ok = b.verified;
    if (!b.verified) rep["witness"] = b.witness;
    if (ve_certify_window) {
      WindowMatrix m =
          window_matrix(WindowMatrixKind::FrameOperator, gens,
                        make_window(ve_p, ve_wg, ve_wc));
      WindowCertificate cert = certify_window_bounds(m, claimed);
      rep["window_certified"] = cert.valid;
      rep["lower_attained"] = cert.lower_attained;
      rep["upper_attained"] = cert.upper_attained;
      if (!cert.valid) rep["window_witness"] = cert.witness;
      ok = ok && cert.valid;
    }
    finish_report(ok, std::move(rep), out);
  });

  auto* vd = ve->add_subcommand("dual",
                                "mixed frame identity against the canonical "
                                "dual");
  add_common(vd);
  vd->add_option("--method", ve_method, "auto | tight | diagonal | window")
      ->check(CLI::IsMember({"auto", "tight", "diagonal", "window"}));
  vd->add_option("--window-g", ve_wg, "window position exponent G");
  vd->add_option("--window-c", ve_wc, "window cell exponent c <= G");
  vd->callback([&] {
    GeneratorSet gens = resolve_gens(ve_p, ve_gens);
    GeneratorSet dual =
        ve_method == "window"
            ? window_dual(gens, make_window(ve_p, ve_wg, ve_wc))
            : canonical_dual(gens, ve_method == "tight"
                                       ? DualMethod::Tight
                                       : ve_method == "diagonal"
                                             ? DualMethod::Diagonal
                                             : DualMethod::Auto);
    auto corpus = resolve_corpus(ve_p, ve_corpus);
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < corpus.size() && ok; ++i) {
      const PFunction& g = corpus[i];
      if (g.is_zero()) continue;
      CycScalar mixed = mixed_frame_sum(g, dual, gens);
      if (!(mixed == norm2(g))) {
        ok = false;
        witness = "corpus member " + std::to_string(i) +
                  ": mixed sum " + mixed.to_string() + " differs from norm " +
                  norm2(g).to_string();
      }
    }
    njson rep;
    rep["dual_label"] = dual.label;
    if (!ok) rep["witness"] = witness;
    finish_report(ok, std::move(rep), out);
  });

  auto* vde = ve->add_subcommand("decomposition",
                                 "two-sided exact reconstruction");
  add_common(vde);
  vde->callback([&] {
    GeneratorSet gens = resolve_gens(ve_p, ve_gens);
    auto corpus = resolve_corpus(ve_p, ve_corpus);
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < corpus.size() && ok; ++i) {
      Decomposition d = decompose_reconstruct(corpus[i], gens);
      if (!(d.primal_ok && d.dual_ok && d.orders_agree)) {
        ok = false;
        witness = "corpus member " + std::to_string(i) + ": " +
                  (!d.primal_ok ? "primal reconstruction differs"
                   : !d.dual_ok ? "dual reconstruction differs"
                                : "summation orders disagree");
      }
    }
    njson rep;
    if (!ok) rep["witness"] = witness;
    finish_report(ok, std::move(rep), out);
  });

  auto* vs = ve->add_subcommand("set", "multiframelet-set Parseval check");
  add_common(vs, false);
  vs->add_option("--set", ve_set_file, "MultiframeletSet JSON file")
      ->required();
  vs->add_flag("--allow-truncation", ve_truncate,
               "tolerate nonzero-mean generators; ratios become windowed "
               "estimates");
  vs->callback([&] {
    MultiframeletSet s = set_from_json(read_all(ve_set_file));
    if (s.p != ve_p) throw std::runtime_error("set prime disagrees with -p");
    SetVerification rep =
        verify_multiframelet_set(s, resolve_corpus(ve_p, ve_corpus),
                                 ve_truncate);
    njson j;
    j["parseval_consistent"] = rep.parseval_consistent;
    j["truncated"] = rep.truncated;
    j["ratios"] = parseval_ratios(rep.bounds);
    if (!rep.witness.empty()) j["witness"] = rep.witness;
    finish_report(rep.parseval_consistent, std::move(j), out);
  });

  auto* vn = ve->add_subcommand("norm-identity",
                                "set-side norm identity, both sides exact");
  add_common(vn, false);
  vn->add_option("--set", ve_set_file, "MultiframeletSet JSON file")
      ->required();
  vn->callback([&] {
    MultiframeletSet s = set_from_json(read_all(ve_set_file));
    if (s.p != ve_p) throw std::runtime_error("set prime disagrees with -p");
    auto corpus = resolve_corpus(ve_p, ve_corpus);
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < corpus.size() && ok; ++i) {
      NormIdentityReport rep = norm_identity_check(corpus[i], s);
      if (!rep.equal) {
        ok = false;
        witness = "corpus member " + std::to_string(i) + ": " + rep.witness;
      }
    }
    njson rep;
    if (!ok) rep["witness"] = witness;
    finish_report(ok, std::move(rep), out);
  });

  auto* vm = ve->add_subcommand("minimal-norm",
                                "canonical coefficients minimize the norm "
                                "(zero-mean corpus)");
  add_common(vm);
  vm->callback([&] {
    GeneratorSet gens = resolve_gens(ve_p, ve_gens);
    GeneratorSet dual = canonical_dual(gens, DualMethod::Auto);
    bool doubled = gens.generators.size() % 2 == 0 &&
                   ve_gens.spec.find("doubled") != std::string::npos;
    // alternative tables must be finite, so only zero-mean draws qualify
    CorpusOpts co = ve_corpus;
    co.zero_mean = true;
    auto corpus = resolve_corpus(ve_p, co);
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < corpus.size() && ok; ++i) {
      const PFunction& g = corpus[i];
      if (g.is_zero()) continue;
      CoefficientTable alt = analyze(g, dual);
      if (doubled && !alt.entries.empty()) {
        // shift mass between the two copies of one generator: a synthesis
        // kernel direction, so the superposition is unchanged
        auto half = static_cast<long>(gens.generators.size() / 2);
        auto [idx, c] = *alt.entries.begin();
        FrameIndex other{idx.l < half ? idx.l + half : idx.l - half, idx.j,
                         idx.a};
        alt.entries.insert_or_assign(idx, c + CycScalar::one(ve_p));
        auto it = alt.entries.find(other);
        if (it == alt.entries.end())
          alt.entries.emplace(other, -CycScalar::one(ve_p));
        else
          it->second = it->second - CycScalar::one(ve_p);
      }
      MinimalNormReport rep = minimal_norm_identity(g, gens, alt);
      if (!rep.pythagoras) {
        ok = false;
        witness = "corpus member " + std::to_string(i) +
                  ": alt mass " + rep.alt_sum.to_string() +
                  " differs from canonical " + rep.canonical_sum.to_string() +
                  " + residual " + rep.residual_sum.to_string();
      }
    }
    njson rep;
    if (!ok) rep["witness"] = witness;
    finish_report(ok, std::move(rep), out);
  });

  auto* vpr = ve->add_subcommand("projection",
                                 "range projection fixes analysis images "
                                 "(zero-mean corpus)");
  add_common(vpr);
  vpr->callback([&] {
    GeneratorSet gens = resolve_gens(ve_p, ve_gens);
    // the projection is defined on finite tables; zero-mean draws carry no tail
    CorpusOpts co = ve_corpus;
    co.zero_mean = true;
    auto corpus = resolve_corpus(ve_p, co);
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < corpus.size() && ok; ++i) {
      if (corpus[i].is_zero()) continue;
      CoefficientTable t = analyze(corpus[i], gens);
      CoefficientTable once = range_projection(t, gens);
      CoefficientTable twice = range_projection(once, gens);
      if (!tables_equal(once, t)) {
        ok = false;
        witness = "corpus member " + std::to_string(i) +
                  ": analysis image moved by the projection";
      } else if (!tables_equal(twice, once)) {
        ok = false;
        witness = "corpus member " + std::to_string(i) +
                  ": projection is not idempotent";
      }
    }
    njson rep;
    if (!ok) rep["witness"] = witness;
    finish_report(ok, std::move(rep), out);
  });

  auto* vt = ve->add_subcommand("transport",
                                "unitary transport preserves coefficients");
  add_common(vt);
  vt->add_option("--unitary", ve_unitary, "translate | modulate | dilate")
      ->check(CLI::IsMember({"translate", "modulate", "dilate"}));
  vt->add_option("--param", ve_param,
                 "p-adic rational parameter for translate/modulate");
  vt->add_option("--jshift", ve_jshift, "scale shift for dilate");
  vt->callback([&] {
    GeneratorSet gens = resolve_gens(ve_p, ve_gens);
    Unitary u{ve_unitary == "translate"  ? Unitary::Kind::Translate
              : ve_unitary == "modulate" ? Unitary::Kind::Modulate
                                         : Unitary::Kind::Dilate,
              PadicRational::parse(ve_p, ve_param),
              ve_unitary == "dilate" ? ve_jshift : 0};
    TransportReport rep =
        unitary_transport_check(gens, resolve_corpus(ve_p, ve_corpus), u);
    njson j;
    j["unitary"] = u.to_string();
    if (!rep.verified) j["witness"] = rep.witness;
    finish_report(rep.verified, std::move(j), out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return g_rc;
}
