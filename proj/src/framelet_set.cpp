#include "qpframe/framelet_set.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qpframe {

Rational BallUnionSet::measure() const {
  Rational m(0);
  for (const auto& b : balls) m += b.measure();
  return m;
}

PFunction BallUnionSet::indicator() const {
  std::vector<Atom> atoms;
  atoms.reserve(balls.size());
  for (const auto& b : balls)
    atoms.emplace_back(CycScalar::one(p), PadicRational(p), b);
  return PFunction(p, std::move(atoms));
}

bool BallUnionSet::contains(const PadicRational& x) const {
  for (const auto& b : balls)
    if (b.contains(x)) return true;
  return false;
}

BallUnionSet make_ball_union(long p, std::vector<Ball> balls, bool coarsen) {
  if (p < 2) throw std::invalid_argument("bad prime");
  for (const auto& b : balls)
    if (b.prime() != p)
      throw std::invalid_argument("mixed primes in ball union");
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (std::size_t j = i + 1; j < balls.size(); ++j)
      if (balls[i].relation(balls[j]) != BallRelation::Disjoint)
        throw std::invalid_argument("balls " + balls[i].to_string() + " and " +
                                    balls[j].to_string() + " overlap");
  if (coarsen) {
    // Collapse complete sibling p-tuples; disjointness is preserved since a
    // ball disjoint from all p children is disjoint from the parent.
    bool merged = true;
    while (merged) {
      merged = false;
      std::map<Ball, std::set<PadicRational>> groups;
      for (const auto& b : balls)
        groups.emplace(Ball(b.gamma() + 1, b.center()), std::set<PadicRational>{})
            .first->second.insert(b.center());
      for (const auto& [parent, centers] : groups) {
        if (centers.size() != static_cast<std::size_t>(p)) continue;
        std::vector<Ball> next;
        for (const auto& b : balls)
          if (!(Ball(b.gamma() + 1, b.center()) == parent)) next.push_back(b);
        next.push_back(parent);
        balls = std::move(next);
        merged = true;
        break;
      }
    }
  }
  std::sort(balls.begin(), balls.end());
  return BallUnionSet{p, std::move(balls)};
}

MultiframeletSet make_multiframelet_set(long p,
                                        std::vector<BallUnionSet> parts) {
  if (parts.empty()) throw std::invalid_argument("set needs at least one part");
  std::vector<Ball> all;
  for (const auto& part : parts) {
    if (part.p != p) throw std::invalid_argument("mixed primes in set parts");
    if (part.balls.empty())
      throw std::invalid_argument("empty part in multiframelet set");
    all.insert(all.end(), part.balls.begin(), part.balls.end());
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (all[i].relation(all[j]) != BallRelation::Disjoint)
        throw std::invalid_argument("set parts overlap at " +
                                    all[i].to_string());
  return MultiframeletSet{p, std::move(parts)};
}

GeneratorSet generators_from_set(const MultiframeletSet& s) {
  GeneratorSet out;
  out.p = s.p;
  out.label = "from-set";
  for (const auto& part : s.parts)
    out.generators.push_back(inverse_fourier(part.indicator()));
  return out;
}

MultiframeletSet example_set(long p) {
  std::vector<BallUnionSet> parts;
  for (long k = 1; k < p; ++k) {
    std::vector<Ball> balls;
    balls.emplace_back(0, PadicRational(p, Integer(-k), -1));
    parts.push_back(make_ball_union(p, std::move(balls)));
  }
  return make_multiframelet_set(p, std::move(parts));
}

SetVerification verify_multiframelet_set(const MultiframeletSet& s,
                                         const std::vector<PFunction>& corpus,
                                         bool allow_truncation) {
  GeneratorSet gens = generators_from_set(s);
  SetVerification rep;
  if (!allow_truncation) {
    rep.bounds = verify_parseval(gens, corpus);
    rep.parseval_consistent = rep.bounds.verified;
    rep.witness = rep.bounds.witness;
    return rep;
  }

  AnalysisOptions opts;
  opts.allow_truncation = true;
  rep.bounds.verified = true;
  for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
    const PFunction& g = corpus[gi];
    if (g.is_zero()) continue;
    CoefficientTable table = analyze(g, gens, opts);
    rep.truncated = rep.truncated || table.truncated;
    CycScalar sigma = table.sum_abs2();
    CycScalar nu = norm2(g);
    RatioObservation obs;
    if (auto sr = sigma.as_rational())
      if (auto nr = nu.as_rational()) {
        obs.exact = true;
        obs.ratio = *sr / *nr;
        if (!rep.bounds.min_ratio || obs.ratio < *rep.bounds.min_ratio)
          rep.bounds.min_ratio = obs.ratio;
        if (!rep.bounds.max_ratio || obs.ratio > *rep.bounds.max_ratio)
          rep.bounds.max_ratio = obs.ratio;
      }
    obs.approx = sigma.approx_abs() / nu.approx_abs();
    rep.bounds.ratios.push_back(obs);
    if (!(sigma == nu) && rep.bounds.verified) {
      rep.bounds.verified = false;
      rep.bounds.witness = "corpus member " + std::to_string(gi) +
                           ": windowed ratio differs from 1";
    }
  }
  rep.parseval_consistent = rep.bounds.verified && !rep.truncated;
  if (rep.truncated)
    rep.witness = "nonzero-mean generator: table truncated at the window "
                  "edge, ratios are lower estimates";
  else
    rep.witness = rep.bounds.witness;
  return rep;
}

NormIdentityReport norm_identity_check(const PFunction& g,
                                       const MultiframeletSet& s) {
  long p = s.p;
  if (g.prime() != p)
    throw std::invalid_argument("mixed primes in norm identity");
  NormIdentityReport rep{CycScalar(p), CycScalar(p), false, ""};
  if (g.is_zero()) {
    rep.equal = true;
    return rep;
  }

  GeneratorSet gens = generators_from_set(s);
  CycScalar nu = norm2(g);
  if (!(sum_squares(g, gens) == nu))
    throw std::domain_error(
        "set is not Parseval-consistent on g: the norm identity assumes a "
        "normalized tight system");
  rep.lhs = nu;

  PFunction ghat_conj = fourier(g).conjugate();
  SupportEnumeration e = enumerate_support(g, gens);

  // I(l,j,a) = int_{p^{-j} F_l} chi(p^j a xi) conj(ghat)(xi) d xi with the
  // part balls dilated in place: B_gamma(beta) -> B_{gamma+j}(p^{-j} beta).
  auto set_integral = [&](long l, long long j,
                          const PadicRational& a) -> CycScalar {
    CycScalar acc(p);
    PadicRational m0 = a.shift(j);
    for (const Ball& b : s.parts[static_cast<std::size_t>(l)].balls) {
      Ball d(b.gamma() + j, b.center().shift(-j));
      for (const Atom& at : ghat_conj.atoms()) {
        BallRelation rel = d.relation(at.support);
        if (rel == BallRelation::Disjoint) continue;
        const Ball& inner =
            (rel == BallRelation::SecondInsideFirst) ? at.support : d;
        acc += at.coeff * character_ball_integral(m0 + at.modulation, inner);
      }
    }
    return acc;
  };

  CycScalar rhs(p);
  for (const FrameIndex& idx : e.indices) {
    CycScalar i = set_integral(idx.l, idx.j, idx.a);
    rhs += i.abs2().scaled(pow_rational(p, -idx.j));
  }
  if (e.tail) {
    long long t = e.tail->j_min;
    Rational geo = pow_rational(p, t) / Rational(p - 1);
    for (const TailTerm& term : e.tail->terms) {
      // Below the window p^{-j}|I|^2 = p^j m with m scale-free; probe the
      // law at two scales, then resum the geometric series.
      CycScalar m1 = set_integral(term.l, t - 1, term.a)
                         .abs2()
                         .scaled(pow_rational(p, -2 * (t - 1)));
      CycScalar m2 = set_integral(term.l, t - 2, term.a)
                         .abs2()
                         .scaled(pow_rational(p, -2 * (t - 2)));
      if (!(m1 == m2)) {
        rep.rhs = rhs;
        rep.witness = "coarse-scale law failed at (l=" +
                      std::to_string(term.l + 1) + ", a=" +
                      term.a.to_string() + ")";
        return rep;
      }
      rhs += m1.scaled(geo);
    }
  }
  rep.rhs = rhs;
  rep.equal = (rep.lhs == rep.rhs);
  if (!rep.equal)
    rep.witness = "lhs " + rep.lhs.to_string() + " differs from rhs " +
                  rep.rhs.to_string();
  return rep;
}

SetTopology set_topology(const MultiframeletSet& s) {
  for (const auto& part : s.parts)
    if (part.balls.empty())
      throw std::invalid_argument("empty part in multiframelet set");
  // Finite unions of compact-open balls; never connected since every ball
  // splits into proper clopen children.
  return SetTopology{true, true, false};
}

}  // namespace qpframe
