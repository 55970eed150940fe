#pragma once

// Finite-dimensional window stage: the frame operator S compressed to the
// span of the p^{G-c} indicator cells of B_G(0) at constancy scale c. The
// compression is exact (entry sums plus the closed-form geometric tail), so
// Hermitian structure, bound certificates and dual solves are decided in
// exact arithmetic; floating point appears only as a candidate generator
// for the matrix inverse square root, whose output is re-verified exactly.

#include <optional>
#include <string>
#include <vector>

#include "qpframe/frame.hpp"

namespace qpframe {

struct WindowSpace {
  long p = 2;
  long long big_g = 0;  // window ball exponent G (support radius p^G)
  long long c = 0;      // cell exponent c <= G (constancy scale p^c)

  std::size_t dimension() const;      // p^{G-c}
  Rational cell_norm2() const;        // p^c, shared by every basis cell
  PadicRational cell_center(std::size_t i) const;
  std::vector<PFunction> basis() const;
};

/// Validates c <= G and dimension <= 4096.
WindowSpace make_window(long p, long long big_g, long long c);

/// Exact coordinates of g in the cell basis when g lies in the window
/// (support inside B_G(0), constant at scale c); nullopt otherwise.
std::optional<std::vector<CycScalar>> window_coords(const PFunction& g,
                                                    const WindowSpace& w);

enum class WindowMatrixKind { FrameOperator, Gram };

struct WindowMatrix {
  long p = 2;
  WindowMatrixKind kind = WindowMatrixKind::FrameOperator;
  WindowSpace space;
  // Gram kind: row/column labels, the union of enumerated frame indices
  // over the window cells. Empty for FrameOperator.
  std::vector<FrameIndex> index;
  std::vector<std::vector<CycScalar>> entry;
  bool hermitian = false;
};

/// FrameOperator: M_ij = <S e_i, e_j> / p^c, exact via per-cell analysis
/// tables sharing one forced tail floor. Gram: <f_idx, f_idx'> over the
/// union enumeration. Requires zero-mean generators (else S e_i is not
/// exactly summable) but not window invariance; see window_invariance.
WindowMatrix window_matrix(WindowMatrixKind kind, const GeneratorSet& gens,
                           const WindowSpace& w);

enum class WindowInvariance { Invariant, NotInvariant, Unknown };

/// Does S map the window into itself? Invariant: every S e_i re-expands in
/// the cell basis exactly. NotInvariant: some S e_i was computed and leaves
/// the window. Unknown: the coarse tail of some S e_i has no closed form.
WindowInvariance window_invariance(const GeneratorSet& gens,
                                   const WindowSpace& w);

/// Monic characteristic polynomial, ascending coefficients c_0..c_{n-1}, 1,
/// by the Faddeev-LeVerrier recursion in exact arithmetic.
std::vector<CycScalar> characteristic_polynomial(const WindowMatrix& m);

struct WindowCertificate {
  bool valid = false;           // A I <= M <= B I
  bool lower_attained = false;  // det(M - A I) = 0
  bool upper_attained = false;  // det(B I - M) = 0
  std::string witness;
};

/// Decides A I <= M <= B I exactly: a Hermitian matrix is positive
/// semidefinite iff its characteristic coefficients alternate in sign.
/// Attained ends certify window-restricted optimality of the bounds.
WindowCertificate certify_window_bounds(const WindowMatrix& m,
                                        const FrameBounds& claimed);

/// Window method for the canonical dual: solves S d_l = f^{(l)} exactly on
/// an S-invariant window containing the generators, by Gaussian elimination
/// over the scalar field. Each solution is re-verified through S.
GeneratorSet window_dual(const GeneratorSet& gens, const WindowSpace& w);

/// S^{-1/2} gens in closed form: tight systems scale by 1/sqrt(lambda),
/// cross-orthogonal branches by 1/sqrt(nu_l); exact Parseval output.
GeneratorSet s_inv_sqrt_window(const GeneratorSet& gens);

/// Numeric window path: a floating M^{-1/2} rounded to dyadic rationals and
/// applied to the window coordinates of the generators. The output is an
/// exactly representable system whose Parseval ratios differ from 1 by at
/// most 2^{-tolerance_bits} (tolerance_bits in [24, 44]); callers re-verify
/// with verify_frame_bounds, which is exact. Requires an invariant window
/// and a real positive-definite compression.
GeneratorSet s_inv_sqrt_window(const GeneratorSet& gens, const WindowSpace& w,
                               long tolerance_bits = 40);

}  // namespace qpframe
