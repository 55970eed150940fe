#include "qpframe/frame.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qpframe {

namespace {

void validate(const GeneratorSet& gens) {
  if (gens.generators.empty())
    throw std::invalid_argument("empty generator set");
  for (const auto& f : gens.generators) {
    if (f.prime() != gens.p)
      throw std::invalid_argument("mixed primes in generator set");
    if (f.is_zero()) throw std::invalid_argument("zero generator");
  }
}

PadicRational zero_of(long p) { return PadicRational(p); }

Ball unit_ball(long p) { return Ball(0, PadicRational(p)); }

}  // namespace

GeneratorSet kozyrev_generators(long p) {
  GeneratorSet out;
  out.p = p;
  out.label = "kozyrev-" + std::to_string(p);
  for (long k = 1; k < p; ++k) {
    std::vector<Atom> atoms;
    atoms.emplace_back(CycScalar::one(p), PadicRational(p, Integer(k), -1),
                       unit_ball(p));
    out.generators.emplace_back(p, std::move(atoms));
  }
  return out;
}

GeneratorSet ks_generators(long p, long long m) {
  if (m < 1) throw std::invalid_argument("family order must be >= 1");
  Integer pm = pow_integer(p, m);
  if (pm > 1000000) throw std::invalid_argument("family order too large");
  GeneratorSet out;
  out.p = p;
  out.label = "ks-" + std::to_string(p) + "-" + std::to_string(m);
  for (Integer n(1); n < pm; ++n) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p)))
      continue;
    std::vector<Atom> atoms;
    atoms.emplace_back(CycScalar::one(p), PadicRational(p, n, -m),
                       unit_ball(p));
    out.generators.emplace_back(p, std::move(atoms));
  }
  return out;
}

GeneratorSet doubled_generators(const GeneratorSet& gens) {
  validate(gens);
  GeneratorSet out = gens;
  out.label = "2x-" + gens.label;
  out.generators.insert(out.generators.end(), gens.generators.begin(),
                        gens.generators.end());
  return out;
}

bool FrameIndex::operator<(const FrameIndex& o) const {
  if (l != o.l) return l < o.l;
  if (j != o.j) return j < o.j;
  return a < o.a;
}

bool FrameIndex::operator==(const FrameIndex& o) const {
  return l == o.l && j == o.j && a == o.a;
}

CycScalar CoefficientTable::sum_abs2() const {
  CycScalar acc(p);
  for (const auto& [idx, kappa] : entries) acc += kappa.abs2();
  if (tail) {
    // sum_{j < j_min} p^j = p^{j_min} / (p - 1)
    Rational geo = pow_rational(p, tail->j_min) / Rational(p - 1);
    for (const auto& term : tail->terms) acc += term.t.abs2().scaled(geo);
  }
  return acc;
}

namespace {

struct Enumeration {
  long long j_min = 0;
  long long j_max = 0;
  bool truncated = false;
  std::set<FrameIndex> indices;
  std::optional<Tail> tail;
};

// Coarsest scale at which any generator atom still varies, over support or
// modulation; dilating below t_floor - G leaves only the flat tail law.
long long tail_floor(const GeneratorSet& gens) {
  long long t = LLONG_MAX;
  for (const auto& gen : gens.generators) {
    for (const auto& at : gen.atoms()) {
      long long v = at.support.gamma();
      if (!at.modulation.is_zero())
        v = std::min(v, *at.modulation.valuation());
      t = std::min(t, v);
    }
  }
  return t;
}

long long hull_exponent_at_zero(const PFunction& g) {
  long long big_g = LLONG_MIN;
  for (const auto& at : g.atoms())
    big_g = std::max(big_g, at.support.enclosing_exponent_at_zero());
  return big_g;
}

Enumeration enumerate_indices(const PFunction& g, const GeneratorSet& gens,
                              const AnalysisOptions& opts) {
  Enumeration out;
  if (g.is_zero()) return out;

  CycScalar ig = g.integrate();

  // supp g is contained in B_{G}(0); g is constant at scale c_g.
  long long big_g = hull_exponent_at_zero(g);
  long long cg = g.constancy_exponent();

  // Below j_min every dilated generator atom either misses supp g or covers
  // it with a flat character, giving the p^{j/2} t law of the tail.
  out.j_min = tail_floor(gens) - big_g;
  if (opts.force_j_min) out.j_min = std::min(out.j_min, *opts.force_j_min);

  // Above hull_gamma - c_g - 1 a dilated generator lives inside one
  // constancy cell of g; the coefficient is then a multiple of the
  // generator integral. Nonzero-mean generators therefore truncate.
  bool nonzero_mean_gen = false;
  std::vector<long long> j_hi(gens.generators.size());
  out.j_max = LLONG_MIN;
  for (std::size_t l = 0; l < gens.generators.size(); ++l) {
    const PFunction& gen = gens.generators[l];
    j_hi[l] = gen.hull()->gamma() - cg - 1;
    if (opts.force_j_max) j_hi[l] = std::max(j_hi[l], *opts.force_j_max);
    out.j_max = std::max(out.j_max, j_hi[l]);
    if (!gen.integrate().is_zero()) nonzero_mean_gen = true;
  }
  if (nonzero_mean_gen) {
    if (!opts.allow_truncation)
      throw std::domain_error(
          "a generator has nonzero integral: fine-scale coefficients do not "
          "vanish and any finite table truncates");
    out.truncated = true;
  }

  // Candidate indices from support resonance per atom pair; completeness:
  // a nonzero cross term needs intersecting supports and a character that
  // does not cancel on the intersection, both conditions appear below.
  for (std::size_t l = 0; l < gens.generators.size(); ++l) {
    for (long long j = out.j_min; j <= j_hi[l]; ++j) {
      for (const auto& gi : gens.generators[l].atoms()) {
        long long gamma_i = gi.support.gamma();
        for (const auto& gk : g.atoms()) {
          long long delta_k = gk.support.gamma();
          PadicRational db = gk.modulation - gi.modulation.shift(-j);
          long long cap = std::min(gamma_i - j, delta_k);
          if (!db.is_zero() && *db.valuation() < cap) continue;
          PadicRational rho =
              gk.support.center().shift(-j) - gi.support.center();
          long long r = std::max(gamma_i, delta_k + j);
          for (const auto& a : Ball(r, rho).ip_representatives())
            out.indices.insert(FrameIndex{static_cast<long>(l), j, a});
        }
      }
    }
  }

  if (!ig.is_zero()) {
    std::map<std::pair<long, PadicRational>, CycScalar> tmap;
    for (std::size_t l = 0; l < gens.generators.size(); ++l) {
      for (const auto& gi : gens.generators[l].atoms()) {
        Ball coarse(gi.support.gamma(), -gi.support.center());
        for (const auto& a : coarse.ip_representatives()) {
          CycScalar t = gi.coeff.conjugate() * ig;
          if (!gi.modulation.is_zero() && !a.is_zero())
            t *= character_value(gi.modulation, a);
          auto key = std::make_pair(static_cast<long>(l), a);
          auto it = tmap.find(key);
          if (it == tmap.end())
            tmap.emplace(key, std::move(t));
          else
            it->second += t;
        }
      }
    }
    Tail tail;
    tail.j_min = out.j_min;
    for (const auto& [key, t] : tmap)
      if (!t.is_zero()) tail.terms.push_back(TailTerm{key.first, key.second, t});
    if (!tail.terms.empty()) out.tail = std::move(tail);
  }
  return out;
}

}  // namespace

SupportEnumeration enumerate_support(const PFunction& g,
                                     const GeneratorSet& gens) {
  validate(gens);
  if (g.prime() != gens.p)
    throw std::invalid_argument("mixed primes in analysis");
  Enumeration e = enumerate_indices(g, gens, {});
  SupportEnumeration out;
  out.j_min = e.j_min;
  out.j_max = e.j_max;
  out.indices.assign(e.indices.begin(), e.indices.end());
  out.tail = std::move(e.tail);
  return out;
}

CoefficientTable analyze(const PFunction& g, const GeneratorSet& gens,
                         const AnalysisOptions& opts) {
  validate(gens);
  if (g.prime() != gens.p)
    throw std::invalid_argument("mixed primes in analysis");
  CoefficientTable out;
  out.p = gens.p;
  if (g.is_zero()) return out;
  Enumeration e = enumerate_indices(g, gens, opts);
  out.truncated = e.truncated;
  for (const auto& idx : e.indices) {
    CycScalar kappa = inner_product(
        g, dilate_translate(gens.generators[static_cast<std::size_t>(idx.l)],
                            idx.j, idx.a));
    if (!kappa.is_zero()) out.entries.emplace(idx, kappa);
  }
  out.tail = std::move(e.tail);
  return out;
}

CycScalar sum_squares(const PFunction& g, const GeneratorSet& gens) {
  return analyze(g, gens).sum_abs2();
}

namespace {

PFunction synthesize_ordered(const CoefficientTable& table,
                             const GeneratorSet& gens, bool scale_major) {
  long p = gens.p;
  std::vector<std::pair<FrameIndex, CycScalar>> order(table.entries.begin(),
                                                      table.entries.end());
  if (scale_major) {
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& x, const auto& y) {
                       if (x.first.j != y.first.j) return x.first.j < y.first.j;
                       if (!(x.first.a == y.first.a)) return x.first.a < y.first.a;
                       return x.first.l < y.first.l;
                     });
  }
  std::vector<Atom> atoms;
  for (const auto& [idx, kappa] : order) {
    if (idx.l < 0 ||
        static_cast<std::size_t>(idx.l) >= gens.generators.size())
      throw std::invalid_argument("table references a missing generator");
    PFunction fe = dilate_translate(
        gens.generators[static_cast<std::size_t>(idx.l)], idx.j, idx.a);
    for (const auto& at : fe.atoms())
      atoms.emplace_back(at.coeff * kappa, at.modulation, at.support);
  }
  return PFunction(p, std::move(atoms));
}

// Closed form of sum_{j < j_min} sum_{l,a} p^{j/2} t_{l,a} f^{(l)}_{j,a} for
// complete-shell generators on Z_p: with Omega_m the (constant) shell value
// of sum_l t_l c_l, the scale sum telescopes to
//   sum_m Omega_m p^{j_min - 1 + m} 1_{B_{1 - j_min - m}(0)}.
PFunction resummed_tail(const CoefficientTable& table,
                        const GeneratorSet& gens) {
  long p = gens.p;
  const Tail& tail = *table.tail;

  std::map<PadicRational, CycScalar> omega;
  for (std::size_t l = 0; l < gens.generators.size(); ++l) {
    const PFunction& gen = gens.generators[l];
    if (gen.atoms().size() != 1)
      throw std::domain_error(
          "tail resummation requires single-atom generators on Z_p");
    const Atom& at = gen.atoms()[0];
    if (at.support.gamma() != 0 || !at.support.center().is_zero() ||
        at.modulation.is_zero())
      throw std::domain_error(
          "tail resummation requires modulated unit-ball generators");
    CycScalar t(p);
    for (const auto& term : tail.terms) {
      if (term.l != static_cast<long>(l)) continue;
      if (!term.a.is_zero())
        throw std::domain_error("unexpected off-center tail term");
      t += term.t;
    }
    CycScalar w = t * at.coeff;
    auto it = omega.find(at.modulation);
    if (it == omega.end())
      omega.emplace(at.modulation, std::move(w));
    else
      it->second += w;
  }

  // Shell-constance: all |b|_p = p^m elements of I_p must carry one value.
  std::map<long long, CycScalar> shell;
  for (const auto& [b, w] : omega) {
    long long m = -*b.valuation();
    auto it = shell.find(m);
    if (it == shell.end()) shell.emplace(m, w);
  }
  for (auto& [m, value] : shell) {
    Integer pm = pow_integer(p, m);
    for (Integer n(1); n < pm; ++n) {
      if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p)))
        continue;
      PadicRational b(gens.p, n, -m);
      auto it = omega.find(b);
      CycScalar w = (it == omega.end()) ? CycScalar(p) : it->second;
      if (!(w == value))
        throw std::domain_error(
            "tail not resummable: modulation shell is incomplete or "
            "non-constant");
    }
  }

  std::vector<Atom> atoms;
  for (const auto& [m, value] : shell) {
    if (value.is_zero()) continue;
    Rational scale = pow_rational(p, tail.j_min - 1 + m);
    atoms.emplace_back(value.scaled(scale), zero_of(p),
                       Ball(1 - tail.j_min + (-m), zero_of(p)));
  }
  return PFunction(p, std::move(atoms));
}

}  // namespace

PFunction synthesize(const CoefficientTable& table, const GeneratorSet& gens) {
  validate(gens);
  if (table.p != gens.p)
    throw std::invalid_argument("mixed primes in synthesis");
  if (table.tail)
    throw std::invalid_argument(
        "table carries an infinite tail; use reconstruct");
  return synthesize_ordered(table, gens, false);
}

PFunction reconstruct(const CoefficientTable& table, const GeneratorSet& gens) {
  validate(gens);
  if (table.p != gens.p)
    throw std::invalid_argument("mixed primes in synthesis");
  PFunction out = synthesize_ordered(table, gens, false);
  if (table.tail && !table.tail->terms.empty())
    out = out + resummed_tail(table, gens);
  return out;
}

PFunction frame_operator_apply(const PFunction& g, const GeneratorSet& gens) {
  return reconstruct(analyze(g, gens), gens);
}

BoundsReport verify_frame_bounds(const GeneratorSet& gens,
                                 const std::vector<PFunction>& corpus,
                                 const FrameBounds& claimed) {
  validate(gens);
  const Rational& a_bound = claimed.a;
  const Rational& b_bound = claimed.b;
  if (!(a_bound > 0) || !(b_bound >= a_bound))
    throw std::invalid_argument("need 0 < A <= B");
  BoundsReport rep;
  rep.verified = true;
  for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
    const PFunction& g = corpus[gi];
    if (g.is_zero()) continue;
    CycScalar sigma = sum_squares(g, gens);
    CycScalar nu = norm2(g);
    RatioObservation obs;
    auto sr = sigma.as_rational();
    auto nr = nu.as_rational();
    bool ok;
    if (sr && nr) {
      obs.exact = true;
      obs.ratio = *sr / *nr;
      obs.approx = mpq_get_d(obs.ratio.get_mpq_t());
      ok = (obs.ratio >= a_bound) && (obs.ratio <= b_bound);
      if (!rep.min_ratio || obs.ratio < *rep.min_ratio) rep.min_ratio = obs.ratio;
      if (!rep.max_ratio || obs.ratio > *rep.max_ratio) rep.max_ratio = obs.ratio;
    } else {
      obs.approx = sigma.approx_abs() / nu.approx_abs();
      ok = (sigma - nu.scaled(a_bound)).sign_real() >= 0 &&
           (nu.scaled(b_bound) - sigma).sign_real() >= 0;
    }
    rep.ratios.push_back(obs);
    if (!ok && rep.verified) {
      rep.verified = false;
      std::ostringstream os;
      os << "corpus member " << gi << ": sum/norm ratio " << obs.approx
         << " leaves [" << a_bound.get_str() << ", " << b_bound.get_str()
         << "]";
      rep.witness = os.str();
    }
  }
  return rep;
}

BoundsReport verify_parseval(const GeneratorSet& gens,
                             const std::vector<PFunction>& corpus) {
  validate(gens);
  BoundsReport rep;
  rep.verified = true;
  for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
    const PFunction& g = corpus[gi];
    if (g.is_zero()) continue;
    CycScalar sigma = sum_squares(g, gens);
    CycScalar nu = norm2(g);
    RatioObservation obs;
    if (auto sr = sigma.as_rational()) {
      if (auto nr = nu.as_rational()) {
        obs.exact = true;
        obs.ratio = *sr / *nr;
        if (!rep.min_ratio || obs.ratio < *rep.min_ratio)
          rep.min_ratio = obs.ratio;
        if (!rep.max_ratio || obs.ratio > *rep.max_ratio)
          rep.max_ratio = obs.ratio;
      }
    }
    obs.approx = sigma.approx_abs() / nu.approx_abs();
    rep.ratios.push_back(obs);
    if (!(sigma == nu) && rep.verified) {
      rep.verified = false;
      std::ostringstream os;
      os << "corpus member " << gi << ": sum of squares "
         << sigma.to_string() << " differs from norm " << nu.to_string();
      rep.witness = os.str();
    }
  }
  return rep;
}

std::optional<CycScalar> inverse_sqrt_scalar(long p, const Rational& a) {
  if (!(a > 0)) return std::nullopt;
  // 1/sqrt(a) lies in the scalar ring iff a = q^2 p^k.
  Integer num = a.get_num(), den = a.get_den();
  Integer pz(p), n1, d1;
  auto e1 = static_cast<long long>(
      mpz_remove(n1.get_mpz_t(), num.get_mpz_t(), pz.get_mpz_t()));
  auto e2 = static_cast<long long>(
      mpz_remove(d1.get_mpz_t(), den.get_mpz_t(), pz.get_mpz_t()));
  if (!mpz_perfect_square_p(n1.get_mpz_t()) ||
      !mpz_perfect_square_p(d1.get_mpz_t()))
    return std::nullopt;
  Integer sn, sd;
  mpz_sqrt(sn.get_mpz_t(), n1.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), d1.get_mpz_t());
  Rational q(sd, sn);  // 1/sqrt(n1/d1)
  q.canonicalize();
  return CycScalar::half_power(p, -(e1 - e2)).scaled(q);
}

GeneratorSet rescale_to_parseval(const GeneratorSet& gens, const Rational& a) {
  validate(gens);
  if (!(a > 0)) throw std::invalid_argument("tight constant must be positive");
  auto scale = inverse_sqrt_scalar(gens.p, a);
  if (!scale)
    throw std::domain_error(
        "1/sqrt(A) is not representable over Q(zeta, sqrt(p)) for A = " +
        a.get_str());
  GeneratorSet out;
  out.p = gens.p;
  out.label = gens.label + "-parseval";
  for (const auto& gen : gens.generators)
    out.generators.push_back(gen.scaled(*scale));
  return out;
}

namespace {

// lambda for complete-shell systems: every generator a modulated unit-ball
// atom, each modulation shell {|b|_p = p^m} fully covered with constant
// total weight W_m; then S = (sum_m W_m) Id.
std::optional<Rational> tight_constant(const GeneratorSet& gens) {
  long p = gens.p;
  std::map<PadicRational, Rational> weight;
  for (const auto& gen : gens.generators) {
    if (gen.atoms().size() != 1) return std::nullopt;
    const Atom& at = gen.atoms()[0];
    if (at.support.gamma() != 0 || !at.support.center().is_zero() ||
        at.modulation.is_zero())
      return std::nullopt;
    auto w = at.coeff.abs2().as_rational();
    if (!w) return std::nullopt;
    weight[at.modulation] += *w;
  }
  std::map<long long, Rational> shell;
  for (const auto& [b, w] : weight) shell.emplace(-*b.valuation(), w);
  Rational lambda(0);
  for (const auto& [m, w] : shell) {
    Integer pm = pow_integer(p, m);
    if (pm > 1000000) return std::nullopt;
    for (Integer n(1); n < pm; ++n) {
      if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p)))
        continue;
      auto it = weight.find(PadicRational(p, n, -m));
      if (it == weight.end() || it->second != w) return std::nullopt;
    }
    lambda += w;
  }
  if (sgn(lambda) == 0) return std::nullopt;
  return lambda;
}

// Certificate that distinct generator branches are orthogonal at every
// index and each branch is orthogonal to its own shifted copies: the
// complete exact tables pin both down. Restricted to modulated unit-ball
// atoms, where an integer translate of a generator is a phase times the
// generator, so the I_p-indexed tables cover all of Z[1/p].
bool diagonal_certified(const GeneratorSet& gens, std::vector<Rational>& nu) {
  nu.clear();
  for (const auto& gen : gens.generators) {
    if (gen.atoms().size() != 1) return false;
    const Atom& at = gen.atoms()[0];
    if (at.support.gamma() != 0 || !at.support.center().is_zero() ||
        at.modulation.is_zero())
      return false;
  }
  for (std::size_t l = 0; l < gens.generators.size(); ++l) {
    GeneratorSet single;
    single.p = gens.p;
    single.label = "branch";
    single.generators.push_back(gens.generators[l]);
    CoefficientTable self = analyze(gens.generators[l], single);
    auto n2 = norm2(gens.generators[l]).as_rational();
    if (!n2 || sgn(*n2) <= 0) return false;
    if (self.tail || self.entries.size() != 1) return false;
    const auto& [idx, kappa] = *self.entries.begin();
    if (idx.j != 0 || !idx.a.is_zero()) return false;
    if (!(kappa == CycScalar(gens.p, *n2))) return false;
    for (std::size_t l2 = 0; l2 < gens.generators.size(); ++l2) {
      if (l2 == l) continue;
      single.generators[0] = gens.generators[l2];
      CoefficientTable cross = analyze(gens.generators[l], single);
      if (cross.tail || !cross.entries.empty()) return false;
    }
    nu.push_back(*n2);
  }
  return true;
}

}  // namespace

GeneratorSet canonical_dual(const GeneratorSet& gens, DualMethod method) {
  validate(gens);
  long p = gens.p;
  GeneratorSet out;
  out.p = p;
  out.label = gens.label + "-dual";

  if (method == DualMethod::Auto || method == DualMethod::Tight) {
    if (auto lambda = tight_constant(gens)) {
      CycScalar inv(p, Rational(1) / *lambda);
      for (const auto& gen : gens.generators)
        out.generators.push_back(gen.scaled(inv));
      return out;
    }
    if (method == DualMethod::Tight)
      throw std::domain_error(
          "system is not a complete-shell tight family");
  }

  std::vector<Rational> nu;
  if (diagonal_certified(gens, nu)) {
    for (std::size_t l = 0; l < gens.generators.size(); ++l)
      out.generators.push_back(
          gens.generators[l].scaled(CycScalar(p, Rational(1) / nu[l])));
    return out;
  }
  throw std::domain_error(
      "canonical dual: system is neither complete-shell tight nor "
      "cross-orthogonal; use the window method");
}

std::optional<Rational> tight_frame_constant(const GeneratorSet& gens) {
  validate(gens);
  return tight_constant(gens);
}

std::optional<std::vector<Rational>> orthogonal_branch_norms(
    const GeneratorSet& gens) {
  validate(gens);
  std::vector<Rational> nu;
  if (!diagonal_certified(gens, nu)) return std::nullopt;
  return nu;
}

Decomposition decompose_reconstruct(const PFunction& g,
                                    const GeneratorSet& gens) {
  validate(gens);
  GeneratorSet dual = canonical_dual(gens);
  Decomposition rep;

  rep.coeffs = analyze(g, dual);
  const CoefficientTable& cd = rep.coeffs;
  PFunction tail_d(gens.p);
  if (cd.tail && !cd.tail->terms.empty()) tail_d = resummed_tail(cd, gens);
  rep.reconstruction = synthesize_ordered(cd, gens, false) + tail_d;
  PFunction r1b = synthesize_ordered(cd, gens, true) + tail_d;
  rep.primal_ok = equal_as_functions(rep.reconstruction, g);

  CoefficientTable cp = analyze(g, gens);
  PFunction tail_p(gens.p);
  if (cp.tail && !cp.tail->terms.empty()) tail_p = resummed_tail(cp, dual);
  PFunction r2 = synthesize_ordered(cp, dual, false) + tail_p;
  PFunction r2b = synthesize_ordered(cp, dual, true) + tail_p;
  rep.dual_ok = equal_as_functions(r2, g);

  rep.orders_agree = equal_as_functions(rep.reconstruction, r1b) &&
                     equal_as_functions(r2, r2b);
  return rep;
}

CycScalar mixed_frame_sum(const PFunction& g, const GeneratorSet& a,
                          const GeneratorSet& b) {
  validate(a);
  validate(b);
  if (a.p != b.p || g.prime() != a.p)
    throw std::invalid_argument("mixed primes in mixed frame sum");
  if (a.generators.size() != b.generators.size())
    throw std::invalid_argument("mixed frame sum needs matching index sets");
  CycScalar s(a.p);
  if (g.is_zero()) return s;

  // One shared floor makes the two tables index-compatible: entries align
  // per (l, j, a) and both tails start at the same scale.
  AnalysisOptions opts;
  opts.force_j_min =
      std::min(tail_floor(a), tail_floor(b)) - hull_exponent_at_zero(g);
  CoefficientTable ta = analyze(g, a, opts);
  CoefficientTable tb = analyze(g, b, opts);

  for (const auto& [idx, ka] : ta.entries) {
    auto it = tb.entries.find(idx);
    if (it != tb.entries.end()) s += ka * it->second.conjugate();
  }
  if (ta.tail && tb.tail) {
    // kappa^a conj(kappa^b) = p^j t_a conj(t_b) below the floor, so the
    // cross mass is the same geometric series as in sum_abs2.
    std::map<std::pair<long, PadicRational>, CycScalar> bt;
    for (const auto& term : tb.tail->terms)
      bt.emplace(std::make_pair(term.l, term.a), term.t);
    CycScalar tau(a.p);
    for (const auto& term : ta.tail->terms) {
      auto it = bt.find(std::make_pair(term.l, term.a));
      if (it != bt.end()) tau += term.t * it->second.conjugate();
    }
    if (!tau.is_zero())
      s += tau.scaled(pow_rational(a.p, ta.tail->j_min) / Rational(a.p - 1));
  }
  return s;
}

MinimalNormReport minimal_norm_identity(const PFunction& g,
                                        const GeneratorSet& gens,
                                        const CoefficientTable& alt) {
  validate(gens);
  if (alt.tail)
    throw std::invalid_argument("alternative table must be finite");
  if (!equal_as_functions(synthesize(alt, gens), g))
    throw std::invalid_argument(
        "alternative table does not synthesize the target function");

  GeneratorSet dual = canonical_dual(gens);
  AnalysisOptions opts;
  for (const auto& [idx, kappa] : alt.entries)
    opts.force_j_min = opts.force_j_min ? std::min(*opts.force_j_min, idx.j)
                                        : idx.j;
  CoefficientTable can = analyze(g, dual, opts);

  CoefficientTable diff;
  diff.p = gens.p;
  diff.entries = alt.entries;
  for (const auto& [idx, kappa] : can.entries) {
    auto it = diff.entries.find(idx);
    if (it == diff.entries.end()) {
      diff.entries.emplace(idx, -kappa);
    } else {
      it->second -= kappa;
      if (it->second.is_zero()) diff.entries.erase(it);
    }
  }
  if (can.tail) {
    Tail neg = *can.tail;
    for (auto& term : neg.terms) term.t = -term.t;
    diff.tail = std::move(neg);
  }

  MinimalNormReport rep{alt.sum_abs2(), can.sum_abs2(), diff.sum_abs2(),
                        false};
  rep.pythagoras = (rep.alt_sum == rep.canonical_sum + rep.residual_sum);
  return rep;
}

CoefficientTable range_projection(const CoefficientTable& table,
                                  const GeneratorSet& gens) {
  validate(gens);
  if (table.tail)
    throw std::invalid_argument("projection expects a finite table");
  GeneratorSet dual = canonical_dual(gens);
  PFunction h = synthesize(table, dual);
  if (h.is_zero()) {
    CoefficientTable out;
    out.p = gens.p;
    return out;
  }
  return analyze(h, gens);
}

PFunction Unitary::apply(const PFunction& f) const {
  switch (kind) {
    case Kind::Translate:
      return translate(f, param);
    case Kind::Modulate:
      return modulate(f, param);
    case Kind::Dilate:
      return dilate(f, jshift);
  }
  throw std::logic_error("unknown unitary kind");
}

std::string Unitary::to_string() const {
  switch (kind) {
    case Kind::Translate:
      return "translate(" + param.to_string() + ")";
    case Kind::Modulate:
      return "modulate(" + param.to_string() + ")";
    case Kind::Dilate:
      return "dilate(" + std::to_string(jshift) + ")";
  }
  return "?";
}

TransportReport unitary_transport_check(const GeneratorSet& gens,
                                        const std::vector<PFunction>& corpus,
                                        const Unitary& u) {
  validate(gens);
  TransportReport rep;
  rep.verified = true;
  for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
    const PFunction& g = corpus[gi];
    if (g.is_zero()) continue;
    CoefficientTable base = analyze(g, gens);
    PFunction ug = u.apply(g);
    auto fail = [&](const std::string& what) {
      rep.verified = false;
      rep.witness =
          "corpus member " + std::to_string(gi) + " under " + u.to_string() +
          ": " + what;
    };
    if (!(norm2(ug) == norm2(g))) {
      fail("norm not preserved");
      return rep;
    }
    for (const auto& [idx, kappa] : base.entries) {
      PFunction fe = dilate_translate(
          gens.generators[static_cast<std::size_t>(idx.l)], idx.j, idx.a);
      if (!(inner_product(ug, u.apply(fe)) == kappa)) {
        fail("coefficient changed at (l=" + std::to_string(idx.l) +
             ", j=" + std::to_string(idx.j) + ", a=" + idx.a.to_string() +
             ")");
        return rep;
      }
    }
    if (base.tail) {
      for (const auto& term : base.tail->terms) {
        for (long long j = base.tail->j_min - 1; j >= base.tail->j_min - 2;
             --j) {
          PFunction fe = dilate_translate(
              gens.generators[static_cast<std::size_t>(term.l)], j, term.a);
          CycScalar expect = CycScalar::half_power(gens.p, j) * term.t;
          if (!(inner_product(ug, u.apply(fe)) == expect)) {
            fail("tail coefficient changed at scale " + std::to_string(j));
            return rep;
          }
        }
      }
    }
  }
  return rep;
}

ElementBoundReport element_norm_bound_check(const GeneratorSet& gens,
                                            const FrameBounds& bounds,
                                            const std::vector<FrameIndex>& idx) {
  validate(gens);
  const Rational& b_bound = bounds.b;
  ElementBoundReport rep;
  rep.verified = true;
  for (const auto& i : idx) {
    if (i.l < 0 || static_cast<std::size_t>(i.l) >= gens.generators.size())
      throw std::invalid_argument("index references a missing generator");
    const PFunction& gen = gens.generators[static_cast<std::size_t>(i.l)];
    CycScalar n_elem = norm2(dilate_translate(gen, i.j, i.a));
    CycScalar n_gen = norm2(gen);
    bool ok = (n_elem == n_gen);
    if (ok) {
      if (auto q = n_elem.as_rational())
        ok = (*q <= b_bound);
      else
        ok = (CycScalar(gens.p, b_bound) - n_elem).sign_real() >= 0;
    }
    if (!ok) {
      rep.verified = false;
      rep.witness = "element (l=" + std::to_string(i.l) +
                    ", j=" + std::to_string(i.j) + ", a=" + i.a.to_string() +
                    ") violates the norm bound";
      return rep;
    }
  }
  return rep;
}

}  // namespace qpframe
