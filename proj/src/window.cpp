#include "qpframe/window.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace qpframe {

namespace {

using Mat = std::vector<std::vector<CycScalar>>;

void check(const WindowSpace& w) {
  if (w.p < 2) throw std::invalid_argument("bad window prime");
  if (w.c > w.big_g)
    throw std::invalid_argument("window needs cell scale c <= G");
  Integer n = pow_integer(w.p, w.big_g - w.c);
  if (n > 4096) throw std::invalid_argument("window dimension exceeds 4096");
}

Mat zero_matrix(long p, std::size_t n) {
  return Mat(n, std::vector<CycScalar>(n, CycScalar(p)));
}

CycScalar mat_trace(const Mat& a, long p) {
  CycScalar t(p);
  for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
  return t;
}

Mat mat_mul(const Mat& a, const Mat& b, long p) {
  std::size_t n = a.size();
  Mat out = zero_matrix(p, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

// Ascending coefficients c_0..c_{n-1}, 1 of det(tI - A), Faddeev-LeVerrier.
std::vector<CycScalar> char_poly(const Mat& a, long p) {
  std::size_t n = a.size();
  std::vector<CycScalar> coeff(n + 1, CycScalar(p));
  coeff[n] = CycScalar::one(p);
  Mat mk = a;
  for (std::size_t k = 1; k <= n; ++k) {
    CycScalar ck = -mat_trace(mk, p).scaled(Rational(1, static_cast<long>(k)));
    coeff[n - k] = ck;
    if (k == n) break;
    for (std::size_t i = 0; i < n; ++i) mk[i][i] += ck;
    mk = mat_mul(a, mk, p);
  }
  return coeff;
}

// Hermitian matrices: positive semidefinite iff the characteristic
// coefficients alternate, (-1)^{n-k} c_k >= 0 (elementary symmetric
// polynomials of real eigenvalues are nonnegative).
bool psd(const Mat& a, long p, bool& singular) {
  std::vector<CycScalar> coeff = char_poly(a, p);
  std::size_t n = a.size();
  singular = coeff[0].is_zero();
  for (std::size_t k = 0; k < n; ++k) {
    if (coeff[k].is_zero()) continue;
    CycScalar e = ((n - k) % 2 == 1) ? -coeff[k] : coeff[k];
    if (e.sign_real() < 0) return false;
  }
  return true;
}

Mat transposed(const Mat& a, long p) {
  std::size_t n = a.size();
  Mat out = zero_matrix(p, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = a[j][i];
  return out;
}

// Gauss-Jordan over the scalar field; a is consumed.
std::vector<CycScalar> solve_linear(Mat a, std::vector<CycScalar> b) {
  std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col].is_zero()) ++piv;
    if (piv == n)
      throw std::domain_error("window compression is singular");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    CycScalar inv = a[col][col].inverse();
    for (std::size_t j = col; j < n; ++j) a[col][j] *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      CycScalar f = a[r][col];
      for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
      b[r] -= f * b[col];
    }
  }
  return b;
}

PFunction from_coords(const std::vector<CycScalar>& x, const WindowSpace& w) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_zero()) continue;
    atoms.emplace_back(x[i], PadicRational(w.p), Ball(w.c, w.cell_center(i)));
  }
  return PFunction(w.p, std::move(atoms));
}

// Coarsest scale at which any generator atom still resolves structure; below
// t_floor - G every coefficient of a function supported in B_G follows the
// geometric tail law.
long long tail_floor(const GeneratorSet& gens) {
  long long t = LLONG_MAX;
  for (const auto& gen : gens.generators)
    for (const auto& at : gen.atoms()) {
      long long v = at.support.gamma();
      if (!at.modulation.is_zero()) v = std::min(v, *at.modulation.valuation());
      t = std::min(t, v);
    }
  return t;
}

// sum_idx <a-side> conj(<b-side>) over the whole system: entry products on
// the shared window plus one geometric factor for the aligned tails. Both
// tables must have been produced with the same forced floor.
CycScalar polarized_sum(const CoefficientTable& ta, const CoefficientTable& tb,
                        long p, long long floor_j) {
  CycScalar s(p);
  for (const auto& [idx, kappa] : ta.entries) {
    auto it = tb.entries.find(idx);
    if (it != tb.entries.end()) s += kappa * it->second.conjugate();
  }
  if (ta.tail && tb.tail) {
    std::map<std::pair<long, PadicRational>, CycScalar> bm;
    for (const auto& term : tb.tail->terms)
      bm.emplace(std::make_pair(term.l, term.a), term.t);
    CycScalar tau(p);
    for (const auto& term : ta.tail->terms) {
      auto it = bm.find(std::make_pair(term.l, term.a));
      if (it != bm.end()) tau += term.t * it->second.conjugate();
    }
    s += tau.scaled(pow_rational(p, floor_j) / Rational(p - 1));
  }
  return s;
}

// Zero-mean indicator differences at the window cell scale: leading-digit
// pairs on the first two shells outside B_G, one cross-shell pair, and the
// sibling splits inside each cell. Probes only ever certify a mismatch.
std::vector<PFunction> invariance_probes(const WindowSpace& w) {
  long p = w.p;
  auto piece = [&](const PadicRational& center) {
    return Atom(CycScalar::one(p), PadicRational(p), Ball(w.big_g, center));
  };
  auto diff = [&](const Atom& x, const Atom& y) {
    Atom ny(-y.coeff, y.modulation, y.support);
    return PFunction(p, {x, ny});
  };
  std::vector<PFunction> probes;
  for (long long m = 1; m <= 2; ++m)
    for (long d = 1; d + 1 < p; ++d)
      probes.push_back(
          diff(piece(PadicRational(p, Integer(d), -(w.big_g + m))),
               piece(PadicRational(p, Integer(d + 1), -(w.big_g + m)))));
  probes.push_back(diff(piece(PadicRational(p, Integer(1), -(w.big_g + 1))),
                        piece(PadicRational(p, Integer(1), -(w.big_g + 2)))));
  std::size_t n = pow_integer(p, w.big_g - w.c).get_ui();
  for (std::size_t i = 0; i < n; ++i) {
    Ball cell(w.c, w.cell_center(i));
    auto kids = cell.children();
    for (std::size_t k = 1; k < kids.size(); ++k) {
      Atom a(CycScalar::one(p), PadicRational(p), kids[0]);
      Atom b(CycScalar::one(p), PadicRational(p), kids[k]);
      probes.push_back(diff(a, b));
    }
  }
  return probes;
}

}  // namespace

std::size_t WindowSpace::dimension() const {
  Integer n = pow_integer(p, big_g - c);
  return static_cast<std::size_t>(n.get_ui());
}

Rational WindowSpace::cell_norm2() const { return pow_rational(p, c); }

PadicRational WindowSpace::cell_center(std::size_t i) const {
  // i < p^{G-c} written in base p occupies exactly the digits at powers
  // -G .. -c-1, one canonical cell center per value.
  return PadicRational(p, Integer(static_cast<unsigned long>(i)), -big_g);
}

std::vector<PFunction> WindowSpace::basis() const {
  check(*this);
  std::vector<PFunction> cells;
  std::size_t n = dimension();
  cells.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Atom> atoms;
    atoms.emplace_back(CycScalar::one(p), PadicRational(p),
                       Ball(c, cell_center(i)));
    cells.emplace_back(p, std::move(atoms));
  }
  return cells;
}

WindowSpace make_window(long p, long long big_g, long long c) {
  WindowSpace w{p, big_g, c};
  check(w);
  return w;
}

std::optional<std::vector<CycScalar>> window_coords(const PFunction& g,
                                                    const WindowSpace& w) {
  check(w);
  if (g.prime() != w.p)
    throw std::invalid_argument("mixed primes in window coordinates");
  std::vector<PFunction> cells = w.basis();
  Rational inv = Rational(1) / w.cell_norm2();
  std::vector<CycScalar> beta;
  beta.reserve(cells.size());
  for (const auto& cell : cells)
    beta.push_back(inner_product(g, cell).scaled(inv));
  if (!equal_as_functions(from_coords(beta, w), g)) return std::nullopt;
  return beta;
}

WindowMatrix window_matrix(WindowMatrixKind kind, const GeneratorSet& gens,
                           const WindowSpace& w) {
  check(w);
  if (gens.p != w.p) throw std::invalid_argument("mixed primes in window");
  long p = gens.p;
  WindowMatrix out;
  out.p = p;
  out.kind = kind;
  out.space = w;
  std::vector<PFunction> cells = w.basis();

  if (kind == WindowMatrixKind::Gram) {
    std::set<FrameIndex> uni;
    for (const auto& cell : cells) {
      SupportEnumeration e = enumerate_support(cell, gens);
      uni.insert(e.indices.begin(), e.indices.end());
    }
    if (uni.size() > 4096)
      throw std::domain_error("window Gramian dimension exceeds 4096");
    out.index.assign(uni.begin(), uni.end());
    std::vector<PFunction> elems;
    elems.reserve(out.index.size());
    for (const auto& idx : out.index)
      elems.push_back(dilate_translate(
          gens.generators[static_cast<std::size_t>(idx.l)], idx.j, idx.a));
    std::size_t n = elems.size();
    out.entry = zero_matrix(p, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out.entry[i][j] = inner_product(elems[i], elems[j]);
  } else {
    // Shared tail floor so that all cell tails align at one j_min and the
    // cross products below it sum to a single geometric factor.
    AnalysisOptions opts;
    opts.force_j_min = tail_floor(gens) - w.big_g;
    std::size_t n = cells.size();
    std::vector<CoefficientTable> tabs;
    tabs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      tabs.push_back(analyze(cells[i], gens, opts));
      if (tabs[i].tail && tabs[i].tail->j_min != *opts.force_j_min)
        throw std::logic_error("misaligned window tails");
    }
    Rational invc = Rational(1) / w.cell_norm2();
    out.entry = zero_matrix(p, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out.entry[i][j] =
            polarized_sum(tabs[i], tabs[j], p, *opts.force_j_min).scaled(invc);
  }

  out.hermitian = true;
  for (std::size_t i = 0; i < out.entry.size() && out.hermitian; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (!(out.entry[i][j] == out.entry[j][i].conjugate())) {
        out.hermitian = false;
        break;
      }
  return out;
}

WindowInvariance window_invariance(const GeneratorSet& gens,
                                   const WindowSpace& w) {
  check(w);
  if (gens.p != w.p) throw std::invalid_argument("mixed primes in window");
  std::vector<PFunction> cells = w.basis();
  std::vector<std::size_t> pending;  // S(cell) has no finite representation
  for (std::size_t i = 0; i < cells.size(); ++i) {
    PFunction h(w.p);
    try {
      h = frame_operator_apply(cells[i], gens);
    } catch (const std::domain_error&) {
      pending.push_back(i);
      continue;
    }
    if (!window_coords(h, w)) return WindowInvariance::NotInvariant;
  }
  if (pending.empty()) return WindowInvariance::Invariant;

  // S(cell) did not resum to a finite function. The functional
  // <S cell, u> = sum_idx <cell, f_idx> conj(<u, f_idx>) is still exact; if
  // S(cell) lay in the window it would equal its compression, so a single
  // probe mismatch certifies non-invariance. Silence proves nothing.
  try {
    WindowMatrix m = window_matrix(WindowMatrixKind::FrameOperator, gens, w);
    AnalysisOptions opts;
    opts.force_j_min = tail_floor(gens) - (w.big_g + 2);
    std::vector<PFunction> probes = invariance_probes(w);
    std::vector<CoefficientTable> ptabs;
    ptabs.reserve(probes.size());
    for (const auto& u : probes) ptabs.push_back(analyze(u, gens, opts));
    for (std::size_t i : pending) {
      CoefficientTable tc = analyze(cells[i], gens, opts);
      PFunction compressed = from_coords(m.entry[i], w);
      for (std::size_t k = 0; k < probes.size(); ++k) {
        CycScalar delta =
            polarized_sum(tc, ptabs[k], w.p, *opts.force_j_min) -
            inner_product(compressed, probes[k]);
        if (!delta.is_zero()) return WindowInvariance::NotInvariant;
      }
    }
  } catch (const std::exception&) {
    return WindowInvariance::Unknown;
  }
  return WindowInvariance::Unknown;
}

std::vector<CycScalar> characteristic_polynomial(const WindowMatrix& m) {
  return char_poly(m.entry, m.p);
}

WindowCertificate certify_window_bounds(const WindowMatrix& m,
                                        const FrameBounds& claimed) {
  if (!m.hermitian)
    throw std::invalid_argument("cannot certify a non-Hermitian matrix");
  if (!(claimed.a > 0) || !(claimed.b >= claimed.a))
    throw std::invalid_argument("need 0 < A <= B");
  long p = m.p;
  std::size_t n = m.entry.size();
  WindowCertificate out;

  Mat low = m.entry;       // M - A I
  Mat high = zero_matrix(p, n);  // B I - M
  CycScalar a_s(p, claimed.a), b_s(p, claimed.b);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) high[i][j] = -m.entry[i][j];
    low[i][i] -= a_s;
    high[i][i] += b_s;
  }
  bool low_ok = psd(low, p, out.lower_attained);
  bool high_ok = psd(high, p, out.upper_attained);
  out.valid = low_ok && high_ok;
  if (!out.valid) {
    std::ostringstream os;
    os << "window compression leaves [" << claimed.a.get_str() << ", "
       << claimed.b.get_str() << "] on the "
       << (low_ok ? "upper" : "lower") << " side";
    out.witness = os.str();
  }
  return out;
}

GeneratorSet window_dual(const GeneratorSet& gens, const WindowSpace& w) {
  if (window_invariance(gens, w) != WindowInvariance::Invariant)
    throw std::domain_error(
        "window is not certified invariant under the frame operator; "
        "enlarge the window");
  WindowMatrix m = window_matrix(WindowMatrixKind::FrameOperator, gens, w);
  Mat a = transposed(m.entry, gens.p);  // sum_j M_{ji} d_j = beta_i
  GeneratorSet out;
  out.p = gens.p;
  out.label = gens.label + "-window-dual";
  for (std::size_t l = 0; l < gens.generators.size(); ++l) {
    auto beta = window_coords(gens.generators[l], w);
    if (!beta)
      throw std::domain_error("generator " + std::to_string(l + 1) +
                              " leaves the window");
    std::vector<CycScalar> d = solve_linear(a, std::move(*beta));
    PFunction dual = from_coords(d, w);
    if (!equal_as_functions(frame_operator_apply(dual, gens),
                            gens.generators[l]))
      throw std::logic_error("window dual failed its defining identity");
    out.generators.push_back(std::move(dual));
  }
  return out;
}

GeneratorSet s_inv_sqrt_window(const GeneratorSet& gens) {
  long p = gens.p;
  GeneratorSet out;
  out.p = p;
  out.label = gens.label + "-parseval";
  if (auto lambda = tight_frame_constant(gens)) {
    auto s = inverse_sqrt_scalar(p, *lambda);
    if (!s)
      throw std::domain_error("1/sqrt(" + lambda->get_str() +
                              ") is not representable; use the numeric "
                              "window path");
    for (const auto& gen : gens.generators)
      out.generators.push_back(gen.scaled(*s));
    return out;
  }
  if (auto nu = orthogonal_branch_norms(gens)) {
    for (std::size_t l = 0; l < gens.generators.size(); ++l) {
      auto s = inverse_sqrt_scalar(p, (*nu)[l]);
      if (!s)
        throw std::domain_error("1/sqrt(" + (*nu)[l].get_str() +
                                ") is not representable; use the numeric "
                                "window path");
      out.generators.push_back(gens.generators[l].scaled(*s));
    }
    return out;
  }
  throw std::domain_error(
      "system is neither complete-shell tight nor cross-orthogonal; use "
      "the numeric window path");
}

GeneratorSet s_inv_sqrt_window(const GeneratorSet& gens, const WindowSpace& w,
                               long tolerance_bits) {
  if (tolerance_bits < 24 || tolerance_bits > 44)
    throw std::invalid_argument("tolerance bits must lie in [24, 44]");
  if (window_invariance(gens, w) != WindowInvariance::Invariant)
    throw std::domain_error(
        "window is not certified invariant under the frame operator; "
        "enlarge the window");
  WindowMatrix m = window_matrix(WindowMatrixKind::FrameOperator, gens, w);
  if (!m.hermitian) throw std::logic_error("compression is not Hermitian");
  std::size_t n = m.entry.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!m.entry[i][j].is_real())
        throw std::domain_error(
            "the numeric square-root path requires a real compression");

  Eigen::MatrixXd md(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      md(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m.entry[i][j].approx_eval(96).first;
  md = ((md + md.transpose()) / 2).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(md);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue iteration failed");
  if (es.eigenvalues().minCoeff() <= 0)
    throw std::domain_error(
        "window compression is not positive definite (window too small)");
  Eigen::MatrixXd r = es.eigenvectors() *
                      es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose();

  // Doubles are dyadic rationals; adopting them exactly keeps the output in
  // the ring while the Parseval defect stays at solver accuracy.
  GeneratorSet out;
  out.p = gens.p;
  out.label = gens.label + "-sqrt-window";
  for (std::size_t l = 0; l < gens.generators.size(); ++l) {
    auto beta = window_coords(gens.generators[l], w);
    if (!beta)
      throw std::domain_error("generator " + std::to_string(l + 1) +
                              " leaves the window");
    std::vector<CycScalar> x(n, CycScalar(gens.p));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double rij = r(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j));
        if (rij == 0) continue;
        Rational q;
        mpq_set_d(q.get_mpq_t(), rij);
        x[i] += (*beta)[j].scaled(q);
      }
    out.generators.push_back(from_coords(x, w));
  }
  return out;
}

}  // namespace qpframe
