#pragma once

// Wavelet-frame analysis of the dilation-translation systems
//   f^{(l)}_{j,a}(x) = p^{j/2} f^{(l)}(p^{-j} x - a),  j in Z,  a in I_p,
// generated by a finite family of PFunctions. For compactly supported,
// locally constant g all but finitely many coefficients <g, f_{l,j,a}>
// either vanish or follow the coarse-scale law kappa = p^{j/2} t_{l,a}
// with t independent of j, so analysis tables are finite windows plus an
// exactly resummable geometric tail and every frame identity is decided
// in exact arithmetic.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpframe/function.hpp"

namespace qpframe {

struct GeneratorSet {
  long p = 2;
  std::string label;
  std::vector<PFunction> generators;
};

/// Wavelets theta_k(x) = chi(k x / p) 1_{Z_p}(x), k = 1..p-1.
GeneratorSet kozyrev_generators(long p);

/// Order-m family theta_s(x) = chi(s x) 1_{Z_p}(x) over s = n / p^m in I_p
/// with |s|_p = p^m, n ascending; m = 1 recovers kozyrev_generators.
GeneratorSet ks_generators(long p, long long m);

/// Two copies of each generator (a redundant, non-Parseval system).
GeneratorSet doubled_generators(const GeneratorSet& gens);

struct FrameIndex {
  long l = 0;  // generator number
  long long j = 0;
  PadicRational a;

  bool operator<(const FrameIndex& o) const;
  bool operator==(const FrameIndex& o) const;
};

/// Below j_min the coefficients obey <g, f_{l,j,a}> = p^{j/2} t_{l,a}; the
/// squared mass with m = |t|^2 sums to sum m * p^{j_min} / (p - 1).
struct TailTerm {
  long l = 0;
  PadicRational a;
  CycScalar t;
};

struct Tail {
  long long j_min = 0;
  std::vector<TailTerm> terms;
};

struct CoefficientTable {
  long p = 2;
  std::map<FrameIndex, CycScalar> entries;
  std::optional<Tail> tail;
  // Set when a generator has nonzero integral: fine scales are cut at the
  // window edge and the table does not carry the full analysis mass.
  bool truncated = false;

  /// sum |kappa|^2 over entries plus the exact tail mass.
  CycScalar sum_abs2() const;
};

struct FrameBounds {
  Rational a{1};
  Rational b{1};
  bool optimal = false;  // window-certified only
};

/// All (l, j, a) at which <g, f_{l,j,a}> can be nonzero (a finite superset
/// from support/character resonance), plus the coarse-tail descriptor.
struct SupportEnumeration {
  long long j_min = 0;
  long long j_max = 0;
  std::vector<FrameIndex> indices;
  std::optional<Tail> tail;
};

SupportEnumeration enumerate_support(const PFunction& g,
                                     const GeneratorSet& gens);

struct AnalysisOptions {
  std::optional<long long> force_j_min;  // widen the window downward
  std::optional<long long> force_j_max;  // widen the window upward
  bool allow_truncation = false;
};

/// Complete exact coefficient table of g against the system of gens.
CoefficientTable analyze(const PFunction& g, const GeneratorSet& gens,
                         const AnalysisOptions& opts = {});

/// sum over the system of |<g, f_{l,j,a}>|^2, tail included.
CycScalar sum_squares(const PFunction& g, const GeneratorSet& gens);

/// Finite superposition sum kappa_{l,j,a} f^{(l)}_{j,a}; rejects tables
/// with a tail (see reconstruct).
PFunction synthesize(const CoefficientTable& table, const GeneratorSet& gens);

/// Superposition including the tail, resummed in closed form by telescoping
/// the scale sum. Requires the generators to be a union of complete
/// modulation shells on Z_p (Kozyrev / higher-order families and their
/// weighted unions) with shell-constant cross products; throws otherwise.
PFunction reconstruct(const CoefficientTable& table, const GeneratorSet& gens);

/// S g = sum <g, f_idx> f_idx, exact (reconstruct of analyze).
PFunction frame_operator_apply(const PFunction& g, const GeneratorSet& gens);

struct RatioObservation {
  bool exact = false;
  Rational ratio;    // meaningful when exact
  double approx = 0; // always filled
};

struct BoundsReport {
  bool verified = false;
  std::vector<RatioObservation> ratios;
  std::optional<Rational> min_ratio, max_ratio;  // over exact observations
  std::string witness;
};

/// Checks A ||g||^2 <= sum |<g, f_idx>|^2 <= B ||g||^2 exactly per corpus
/// member (certified signs when ratios leave Q).
BoundsReport verify_frame_bounds(const GeneratorSet& gens,
                                 const std::vector<PFunction>& corpus,
                                 const FrameBounds& claimed);

/// Parseval check: sum of squares equals ||g||^2 as exact scalars.
BoundsReport verify_parseval(const GeneratorSet& gens,
                             const std::vector<PFunction>& corpus);

/// Scales by 1/sqrt(A) when representable (A = q^2 p^k); exact Parseval
/// rescaling of a tight system.
GeneratorSet rescale_to_parseval(const GeneratorSet& gens, const Rational& a);

enum class DualMethod { Auto, Tight, Diagonal };

/// Canonical dual system S^{-1} f^{(l)}. Tight: complete-shell systems,
/// dual = gens / lambda. Diagonal: cross-orthogonal branches (certified by
/// exact analysis tables), dual_l = gen_l / ||gen_l||^2.
GeneratorSet canonical_dual(const GeneratorSet& gens,
                            DualMethod method = DualMethod::Auto);

struct Decomposition {
  CoefficientTable coeffs;       // <g, dual_{l,j,a}>
  PFunction reconstruction{2};   // superposition against the primal system
  bool primal_ok = false;     // reconstruction == g
  bool dual_ok = false;       // mirrored form <g, f_idx> against duals == g
  bool orders_agree = false;  // (l,j,a)-major and (j,a,l)-major sums agree
};

/// g = sum <g, dual_idx> f_idx = sum <g, f_idx> dual_idx, exact, with the
/// superposition accumulated in two different index orders.
Decomposition decompose_reconstruct(const PFunction& g,
                                    const GeneratorSet& gens);

/// sum <g, a_idx> conj(<g, b_idx>) over the shared index set, exact. Both
/// analyses are forced onto a common j_min so the two tails align and their
/// cross terms resum to one geometric factor.
CycScalar mixed_frame_sum(const PFunction& g, const GeneratorSet& a,
                          const GeneratorSet& b);

struct MinimalNormReport {
  CycScalar alt_sum;
  CycScalar canonical_sum;
  CycScalar residual_sum;
  bool pythagoras = false;
};

/// For any finite table with synthesize(alt, gens) == g:
/// sum |alt|^2 == sum |canonical|^2 + sum |alt - canonical|^2.
MinimalNormReport minimal_norm_identity(const PFunction& g,
                                        const GeneratorSet& gens,
                                        const CoefficientTable& alt);

/// Orthogonal projection onto the range of the analysis operator:
/// t -> analyze(synthesize(t, dual), gens). Idempotent; annihilates
/// synthesis kernels; fixes analysis images.
CoefficientTable range_projection(const CoefficientTable& table,
                                  const GeneratorSet& gens);

struct Unitary {
  enum class Kind { Translate, Modulate, Dilate };
  Kind kind = Kind::Translate;
  PadicRational param;   // Translate / Modulate
  long long jshift = 0;  // Dilate

  PFunction apply(const PFunction& f) const;
  std::string to_string() const;
};

struct TransportReport {
  bool verified = false;
  std::string witness;
};

/// Recomputes every enumerated coefficient of U g against U f_idx directly
/// and checks it matches <g, f_idx> exactly (tail included, via closed-form
/// probes); the sum-of-squares ratio multiset is therefore transported
/// unchanged.
TransportReport unitary_transport_check(const GeneratorSet& gens,
                                        const std::vector<PFunction>& corpus,
                                        const Unitary& u);

struct ElementBoundReport {
  bool verified = false;
  std::string witness;
};

/// norm2(f_{l,j,a}) == norm2(f_l) <= B for the given indices, exact.
ElementBoundReport element_norm_bound_check(const GeneratorSet& gens,
                                            const FrameBounds& bounds,
                                            const std::vector<FrameIndex>& idx);

/// 1/sqrt(a) as an exact scalar when a = q^2 p^k; nullopt otherwise.
std::optional<CycScalar> inverse_sqrt_scalar(long p, const Rational& a);

/// lambda when the system is a complete-shell family (S = lambda Id);
/// nullopt otherwise.
std::optional<Rational> tight_frame_constant(const GeneratorSet& gens);

/// Per-branch norms when the branches form a cross-orthogonal system
/// (certified through complete exact tables); nullopt otherwise.
std::optional<std::vector<Rational>> orthogonal_branch_norms(
    const GeneratorSet& gens);

}  // namespace qpframe
