#pragma once

// Fourier-side framelet sets: finite disjoint unions of balls whose part
// indicators transform back to generator systems. Finite ball unions are
// the largest class whose indicators stay inside the exact function class,
// so every set-side statement here is decided exactly.

#include <string>
#include <vector>

#include "qpframe/fourier.hpp"
#include "qpframe/frame.hpp"

namespace qpframe {

struct BallUnionSet {
  long p = 2;
  std::vector<Ball> balls;  // pairwise disjoint, sorted

  Rational measure() const;
  PFunction indicator() const;
  bool contains(const PadicRational& x) const;
};

/// Validates disjointness and sorts; with coarsen, complete sibling p-tuples
/// collapse into their parent until none remain (canonical form).
BallUnionSet make_ball_union(long p, std::vector<Ball> balls,
                             bool coarsen = true);

struct MultiframeletSet {
  long p = 2;
  std::vector<BallUnionSet> parts;
};

/// Nonempty parts, pairwise disjoint across the whole union.
MultiframeletSet make_multiframelet_set(long p,
                                        std::vector<BallUnionSet> parts);

/// f^{(l)} = inverse Fourier transform of the part indicators.
GeneratorSet generators_from_set(const MultiframeletSet& s);

/// Parts F_k = {B_0(-k/p)}, k = 1..p-1; generators_from_set recovers the
/// Kozyrev system exactly.
MultiframeletSet example_set(long p);

struct SetVerification {
  BoundsReport bounds;
  bool parseval_consistent = false;
  bool truncated = false;
  std::string witness;
};

/// Builds the generators and measures sum-of-squares ratios over the corpus.
/// Parseval-consistent iff every ratio is exactly 1. Nonzero-mean generators
/// make any finite table a truncation: refused unless allow_truncation, and
/// never Parseval-consistent then.
SetVerification verify_multiframelet_set(const MultiframeletSet& s,
                                         const std::vector<PFunction>& corpus,
                                         bool allow_truncation = false);

struct NormIdentityReport {
  CycScalar lhs{2};  // norm2(g)
  CycScalar rhs{2};  // set-side sum of p^{-j} |integrals over p^{-j} F_l|^2
  bool equal = false;
  std::string witness;
};

/// The set-side norm identity: ||g||^2 equals the sum over (l, j, a) of
/// p^{-j} |int_{p^{-j} F_l} chi(p^j a xi) conj(fourier(g))|^2. The window
/// terms are integrated directly over the dilated set balls; below the
/// window the integrals obey an exact geometric law, probed at two scales
/// and then resummed. Refuses sets that are not Parseval-consistent on g.
NormIdentityReport norm_identity_check(const PFunction& g,
                                       const MultiframeletSet& s);

struct SetTopology {
  bool open = false;
  bool compact = false;
  bool connected = false;
};

/// Finite nonempty ball unions are compact-open and never connected.
SetTopology set_topology(const MultiframeletSet& s);

}  // namespace qpframe
