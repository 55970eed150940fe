#include "qpframe/function.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qpframe {

namespace {

void check_prime_match(long a, long b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string("mixed primes in ") + what);
}

// One modulation class across a complete sibling family assembles into a
// parent atom iff the child coefficients follow the fold phases of a single
// parent-level modulation digit delta; the Atom constructor then splits the
// result back onto exactly these children.
std::optional<Atom> assemble_class(long p, const Ball& parent,
                                   const std::vector<const Atom*>& kids) {
  for (long d = 0; d < p; ++d) {
    PadicRational delta =
        d == 0 ? PadicRational(p)
               : PadicRational(p, Integer(d), parent.gamma() - 1);
    CycScalar c = kids[0]->coeff;
    if (d != 0)
      c = c * character_value(delta, kids[0]->support.center()).conjugate();
    bool match = true;
    for (std::size_t i = 1; i < kids.size() && match; ++i)
      match = kids[i]->coeff ==
              c * character_value(delta, kids[i]->support.center());
    if (match) return Atom(c, kids[0]->modulation + delta, parent);
  }
  return std::nullopt;
}

// Merge complete sibling families back into parent atoms, working up one
// scale at a time. Supports enter pairwise disjoint or equal and stay that
// way: a parent strictly containing a remaining support would have
// contradicted that invariant before its children were formed.
std::vector<Atom> coalesce(long p, std::vector<Atom> atoms) {
  std::map<Ball, std::vector<Atom>> groups;
  std::map<long long, std::vector<Ball>> by_level;
  for (auto& a : atoms) {
    Ball s = a.support;
    auto [it, fresh] = groups.try_emplace(s);
    if (fresh) by_level[s.gamma()].push_back(s);
    it->second.push_back(std::move(a));
  }
  for (auto lv = by_level.begin(); lv != by_level.end(); ++lv) {
    std::map<Ball, std::vector<Ball>> fams;
    for (const Ball& s : lv->second)
      if (groups.count(s)) fams[Ball(lv->first + 1, s.center())].push_back(s);
    for (auto& [parent, kids] : fams) {
      if (kids.size() != static_cast<std::size_t>(p)) continue;
      const std::vector<Atom>& g0 = groups[kids[0]];
      bool shaped = true;
      for (std::size_t i = 1; i < kids.size() && shaped; ++i) {
        const std::vector<Atom>& gi = groups[kids[i]];
        shaped = gi.size() == g0.size();
        for (std::size_t k = 0; k < g0.size() && shaped; ++k)
          shaped = gi[k].modulation == g0[k].modulation;
      }
      if (!shaped) continue;
      std::vector<Atom> lifted;
      lifted.reserve(g0.size());
      for (std::size_t k = 0; k < g0.size(); ++k) {
        std::vector<const Atom*> cls;
        cls.reserve(kids.size());
        for (const Ball& s : kids) cls.push_back(&groups[s][k]);
        auto up = assemble_class(p, parent, cls);
        if (!up) break;
        lifted.push_back(std::move(*up));
      }
      if (lifted.size() != g0.size()) continue;
      for (const Ball& s : kids) groups.erase(s);
      auto [it, fresh] = groups.try_emplace(parent, std::move(lifted));
      if (fresh) by_level[parent.gamma()].push_back(parent);
    }
  }
  std::vector<Atom> out;
  for (auto& [s, v] : groups)
    for (auto& a : v) out.push_back(std::move(a));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CycScalar character_value(const PadicRational& b, const PadicRational& x) {
  return CycScalar::root_of_unity(b.prime(), character_angle(b * x));
}

CycScalar character_ball_integral(const PadicRational& b, const Ball& ball) {
  check_prime_match(b.prime(), ball.prime(), "character integral");
  long p = b.prime();
  if (b.is_zero()) return CycScalar(p, ball.measure());
  // chi(b .) is constant on the ball iff |b|_p <= p^{-gamma}; it integrates
  // to zero otherwise (full character sum over a coset).
  if (*b.valuation() >= ball.gamma())
    return character_value(b, ball.center()).scaled(ball.measure());
  return CycScalar(p);
}

Atom::Atom(CycScalar c, PadicRational b, Ball ball)
    : coeff(std::move(c)),
      modulation(b.truncate_at(ball.gamma())),
      support(std::move(ball)) {
  check_prime_match(coeff.prime(), support.prime(), "atom");
  check_prime_match(b.prime(), support.prime(), "atom");
  PadicRational delta = b - modulation;
  if (!delta.is_zero())
    coeff *= character_value(delta, support.center());
}

bool Atom::operator<(const Atom& o) const {
  if (support != o.support) return support < o.support;
  return modulation < o.modulation;
}

PFunction::PFunction(long p, std::vector<Atom> atoms)
    : p_(p), atoms_(std::move(atoms)) {
  normalize();
}

void PFunction::normalize() {
  for (const auto& a : atoms_) check_prime_match(a.support.prime(), p_, "function");
  atoms_.erase(std::remove_if(atoms_.begin(), atoms_.end(),
                              [](const Atom& a) { return a.coeff.is_zero(); }),
               atoms_.end());

  // Refine until supports are pairwise disjoint or equal. Any two balls are
  // nested or disjoint, so an atom needs splitting exactly when its ball is
  // a strict ancestor of some other support; splitting onto the children
  // leaves the function unchanged and the Atom constructor re-canonicalizes
  // the modulation per child. Marking every strict ancestor of every support
  // up front makes the refinement a single worklist pass.
  if (atoms_.size() > 1) {
    long long g_max = atoms_[0].support.gamma();
    for (const auto& a : atoms_)
      g_max = std::max(g_max, a.support.gamma());
    std::set<Ball> marks;
    for (const auto& a : atoms_)
      for (long long g = a.support.gamma() + 1; g <= g_max; ++g)
        if (!marks.insert(Ball(g, a.support.center())).second)
          break;  // the rest of the chain is already marked
    if (!marks.empty()) {
      std::vector<Atom> done;
      done.reserve(atoms_.size());
      std::vector<Atom> queue = std::move(atoms_);
      while (!queue.empty()) {
        Atom a = std::move(queue.back());
        queue.pop_back();
        if (marks.count(a.support)) {
          for (const Ball& child : a.support.children())
            queue.emplace_back(a.coeff, a.modulation, child);
        } else {
          done.push_back(std::move(a));
        }
      }
      atoms_ = std::move(done);
    }
  }

  std::sort(atoms_.begin(), atoms_.end());
  std::vector<Atom> merged;
  for (auto& a : atoms_) {
    if (!merged.empty() && merged.back().support == a.support &&
        merged.back().modulation == a.modulation) {
      merged.back().coeff += a.coeff;
    } else {
      merged.push_back(std::move(a));
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Atom& a) { return a.coeff.is_zero(); }),
               merged.end());
  atoms_ = std::move(merged);

  // Coarsen back: complete sibling families that assemble into parent atoms
  // collapse, so refinement introduced by sums and splits has an exact
  // inverse and does not accumulate across arithmetic.
  if (atoms_.size() >= static_cast<std::size_t>(p_))
    atoms_ = coalesce(p_, std::move(atoms_));
}

CycScalar PFunction::evaluate(const PadicRational& x) const {
  CycScalar v(p_);
  for (const auto& a : atoms_)
    if (a.support.contains(x)) v += a.coeff * character_value(a.modulation, x);
  return v;
}

CycScalar PFunction::integrate() const {
  CycScalar v(p_);
  for (const auto& a : atoms_)
    v += a.coeff * character_ball_integral(a.modulation, a.support);
  return v;
}

PFunction PFunction::operator+(const PFunction& o) const {
  check_prime_match(p_, o.p_, "sum");
  std::vector<Atom> all = atoms_;
  all.insert(all.end(), o.atoms_.begin(), o.atoms_.end());
  return PFunction(p_, std::move(all));
}

PFunction PFunction::operator-() const {
  std::vector<Atom> all;
  all.reserve(atoms_.size());
  for (const auto& a : atoms_)
    all.emplace_back(-a.coeff, a.modulation, a.support);
  return PFunction(p_, std::move(all));
}

PFunction PFunction::operator-(const PFunction& o) const { return *this + (-o); }

PFunction PFunction::scaled(const CycScalar& c) const {
  check_prime_match(p_, c.prime(), "scaling");
  std::vector<Atom> all;
  for (const auto& a : atoms_) all.emplace_back(a.coeff * c, a.modulation, a.support);
  return PFunction(p_, std::move(all));
}

PFunction PFunction::conjugate() const {
  std::vector<Atom> all;
  for (const auto& a : atoms_)
    all.emplace_back(a.coeff.conjugate(), -a.modulation, a.support);
  return PFunction(p_, std::move(all));
}

PFunction PFunction::coarsened() const {
  std::vector<Atom> atoms = atoms_;
  bool changed = true;
  while (changed) {
    changed = false;
    // Group atoms whose supports are siblings under a common parent ball.
    std::map<Ball, std::vector<std::size_t>> by_parent;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const Ball& b = atoms[i].support;
      by_parent[Ball(b.gamma() + 1, b.center())].push_back(i);
    }
    for (const auto& [parent, members] : by_parent) {
      // All-or-nothing per parent: every modulation group must fill the p
      // children coherently, otherwise merging would nest supports.
      std::map<PadicRational, std::vector<std::size_t>> groups;
      for (std::size_t i : members) groups[atoms[i].modulation].push_back(i);
      bool all_ok = !groups.empty();
      std::vector<Atom> replacement;
      for (const auto& [bmod, idxs] : groups) {
        if (idxs.size() != static_cast<std::size_t>(p_)) {
          all_ok = false;
          break;
        }
        // Try parent modulations bmod + d p^{gamma_child}; the child atom
        // coefficients must follow the folded phases chi(delta a_child).
        long long gc = parent.gamma() - 1;
        bool matched = false;
        for (long d = 0; d < p_ && !matched; ++d) {
          PadicRational delta = PadicRational(p_, d).shift(gc);
          const Atom& first = atoms[idxs[0]];
          CycScalar cand = first.coeff;
          if (!delta.is_zero())
            cand *= character_value(delta, first.support.center()).conjugate();
          bool ok = true;
          for (std::size_t t = 1; t < idxs.size() && ok; ++t) {
            const Atom& at = atoms[idxs[t]];
            CycScalar want = delta.is_zero()
                                 ? cand
                                 : cand * character_value(delta, at.support.center());
            ok = (at.coeff == want);
          }
          if (ok) {
            replacement.emplace_back(cand, bmod + delta, parent);
            matched = true;
          }
        }
        if (!matched) {
          all_ok = false;
          break;
        }
      }
      if (all_ok && !replacement.empty()) {
        std::vector<Atom> next;
        std::vector<bool> drop(atoms.size(), false);
        for (std::size_t i : members) drop[i] = true;
        for (std::size_t i = 0; i < atoms.size(); ++i)
          if (!drop[i]) next.push_back(atoms[i]);
        next.insert(next.end(), replacement.begin(), replacement.end());
        atoms = std::move(next);
        changed = true;
        break;
      }
    }
  }
  std::sort(atoms.begin(), atoms.end());
  PFunction out(p_);
  out.atoms_ = std::move(atoms);
  return out;
}

std::optional<Ball> PFunction::hull() const {
  std::optional<Ball> h;
  for (const auto& a : atoms_)
    h = h ? Ball::enclosing(*h, a.support) : a.support;
  return h;
}

long long PFunction::constancy_exponent() const {
  if (atoms_.empty())
    throw std::domain_error("constancy exponent of the zero function");
  long long c = LLONG_MAX;
  for (const auto& a : atoms_) {
    long long v = a.support.gamma();
    if (!a.modulation.is_zero())
      v = std::min(v, *a.modulation.valuation());
    c = std::min(c, v);
  }
  return c;
}

std::string PFunction::to_string() const {
  if (atoms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& a : atoms_) {
    if (!first) os << "  +  ";
    first = false;
    os << "[" << a.coeff.to_string() << "] chi(" << a.modulation.to_string()
       << " x) on " << a.support.to_string();
  }
  return os.str();
}

CycScalar inner_product(const PFunction& f, const PFunction& g) {
  check_prime_match(f.prime(), g.prime(), "inner product");
  CycScalar acc(f.prime());
  for (const auto& af : f.atoms()) {
    for (const auto& ag : g.atoms()) {
      BallRelation rel = af.support.relation(ag.support);
      if (rel == BallRelation::Disjoint) continue;
      const Ball& small =
          (rel == BallRelation::SecondInsideFirst) ? ag.support : af.support;
      acc += af.coeff * ag.coeff.conjugate() *
             character_ball_integral(af.modulation - ag.modulation, small);
    }
  }
  return acc;
}

CycScalar norm2(const PFunction& f) { return inner_product(f, f); }

PFunction dilate_translate(const PFunction& f, long long j,
                           const PadicRational& a) {
  check_prime_match(f.prime(), a.prime(), "dilation");
  long p = f.prime();
  CycScalar scale = CycScalar::half_power(p, j);
  std::vector<Atom> out;
  for (const auto& at : f.atoms()) {
    CycScalar c = at.coeff * scale;
    if (!at.modulation.is_zero() && !a.is_zero())
      c *= character_value(at.modulation, a).conjugate();
    out.emplace_back(std::move(c), at.modulation.shift(-j),
                     Ball(at.support.gamma() - j,
                          (a + at.support.center()).shift(j)));
  }
  return PFunction(p, std::move(out));
}

PFunction translate(const PFunction& f, const PadicRational& beta) {
  check_prime_match(f.prime(), beta.prime(), "translation");
  std::vector<Atom> out;
  for (const auto& at : f.atoms()) {
    CycScalar c = at.coeff;
    if (!at.modulation.is_zero() && !beta.is_zero())
      c *= character_value(at.modulation, beta).conjugate();
    out.emplace_back(std::move(c), at.modulation,
                     Ball(at.support.gamma(), at.support.center() + beta));
  }
  return PFunction(f.prime(), std::move(out));
}

PFunction modulate(const PFunction& f, const PadicRational& beta) {
  check_prime_match(f.prime(), beta.prime(), "modulation");
  std::vector<Atom> out;
  for (const auto& at : f.atoms())
    out.emplace_back(at.coeff, at.modulation + beta, at.support);
  return PFunction(f.prime(), std::move(out));
}

PFunction dilate(const PFunction& f, long long j) {
  return dilate_translate(f, j, PadicRational(f.prime()));
}

bool equal_as_functions(const PFunction& f, const PFunction& g) {
  return (f - g).is_zero();
}

}  // namespace qpframe
