#include "qpframe/cyclo.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qpframe {

namespace {

void check_same_prime(long a, long b) {
  if (a != b) throw std::invalid_argument("mixed primes in scalar arithmetic");
}

// den(r) = p^e is an invariant of every angle that reaches a scalar; enforce.
long long angle_level(long p, const Rational& r) {
  if (sgn(r) == 0) return 0;
  Integer den = r.get_den();
  Integer rem;
  auto e = static_cast<long long>(
      mpz_remove(rem.get_mpz_t(), den.get_mpz_t(), Integer(p).get_mpz_t()));
  if (rem != 1)
    throw std::invalid_argument("angle denominator is not a power of p");
  return e;
}

Rational mod_one(const Rational& r) {
  // Reduce into [0, 1).
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  Rational out = r - Rational(q);
  out.canonicalize();
  return out;
}

}  // namespace

CycScalar::CycScalar(long p) : p_(p) {
  if (p < 2) throw std::invalid_argument("prime must be >= 2");
}

CycScalar::CycScalar(long p, const Rational& q) : CycScalar(p) {
  if (sgn(q) != 0) {
    Rational qq = q;
    qq.canonicalize();
    terms_[{0, Rational(0)}] = qq;
  }
}

CycScalar::CycScalar(long p, const Rational& q, int h, const RationalAngle& r)
    : CycScalar(p) {
  if (h != 0 && h != 1) throw std::invalid_argument("half-power parity");
  if (sgn(q) != 0) {
    Rational qq = q;
    qq.canonicalize();
    terms_[{h, r.turns()}] = qq;
    reduce();
  }
}

CycScalar CycScalar::root_of_unity(long p, const RationalAngle& r) {
  return CycScalar(p, Rational(1), 0, r);
}

CycScalar CycScalar::half_power(long p, long long k) {
  long long e = (k >= 0) ? k / 2 : -((-k + 1) / 2);  // floor(k / 2)
  int h = static_cast<int>(k - 2 * e);
  Rational q = pow_rational(p, e);
  return CycScalar(p, q, h, RationalAngle());
}

void CycScalar::reduce() {
  TermMap out;
  for (int h = 0; h <= 1; ++h) {
    long long m = 0;
    for (const auto& [key, q] : terms_)
      if (key.first == h) m = std::max(m, angle_level(p_, key.second));

    Integer big_n = pow_integer(p_, m);
    Integer step = (m >= 1) ? pow_integer(p_, m - 1) : Integer(1);
    Integer phi = big_n - (m >= 1 ? step : Integer(0));

    // zeta = e^{2 pi i / p^m}; map angle r to the exponent r * p^m.
    std::map<Integer, Rational> expo;
    for (const auto& [key, q] : terms_) {
      if (key.first != h) continue;
      Integer e = key.second.get_num() * (big_n / key.second.get_den());
      Rational& slot = expo[e];
      slot += q;
      if (sgn(slot) == 0) expo.erase(e);
    }

    if (m >= 1) {
      // e in [phi, p^m): zeta^e = -sum_{t<p-1} zeta^{e-phi+t p^{m-1}},
      // all replacement exponents < phi, so one descending pass suffices.
      while (!expo.empty()) {
        auto it = std::prev(expo.end());
        if (it->first < phi) break;
        Integer e = it->first;
        Rational q = it->second;
        expo.erase(it);
        Integer c = e - phi;
        for (long t = 0; t + 1 < p_; ++t) {
          Integer e2 = c + Integer(t) * step;
          Rational& slot = expo[e2];
          slot -= q;
          if (sgn(slot) == 0) expo.erase(e2);
        }
      }
    }

    for (const auto& [e, q] : expo) {
      Rational angle(e, big_n);
      angle.canonicalize();
      out[{h, angle}] = q;
    }
  }
  terms_ = std::move(out);
}

CycScalar CycScalar::operator+(const CycScalar& o) const {
  CycScalar r = *this;
  r += o;
  return r;
}

CycScalar& CycScalar::operator+=(const CycScalar& o) {
  check_same_prime(p_, o.p_);
  for (const auto& [key, q] : o.terms_) {
    Rational& slot = terms_[key];
    slot += q;
    if (sgn(slot) == 0) terms_.erase(key);
  }
  reduce();
  return *this;
}

CycScalar CycScalar::operator-() const {
  CycScalar r = *this;
  for (auto& [key, q] : r.terms_) q = -q;
  return r;
}

CycScalar CycScalar::operator-(const CycScalar& o) const { return *this + (-o); }

CycScalar& CycScalar::operator-=(const CycScalar& o) { return *this += -o; }

CycScalar CycScalar::operator*(const CycScalar& o) const {
  check_same_prime(p_, o.p_);
  CycScalar r(p_);
  for (const auto& [k1, q1] : terms_) {
    for (const auto& [k2, q2] : o.terms_) {
      int h = k1.first + k2.first;
      Rational q = q1 * q2;
      if (h == 2) {  // sqrt(p)^2 folds into the rational part
        h = 0;
        q *= p_;
      }
      Rational angle = mod_one(k1.second + k2.second);
      Rational& slot = r.terms_[{h, angle}];
      slot += q;
      if (sgn(slot) == 0) r.terms_.erase({h, angle});
    }
  }
  r.reduce();
  return r;
}

CycScalar& CycScalar::operator*=(const CycScalar& o) {
  *this = *this * o;
  return *this;
}

CycScalar CycScalar::scaled(const Rational& q) const {
  CycScalar r(p_);
  if (sgn(q) == 0) return r;
  r.terms_ = terms_;
  for (auto& [key, c] : r.terms_) c *= q;
  return r;
}

CycScalar CycScalar::conjugate() const {
  CycScalar r(p_);
  for (const auto& [key, q] : terms_) {
    Rational angle =
        (sgn(key.second) == 0) ? Rational(0) : Rational(1) - key.second;
    r.terms_[{key.first, angle}] = q;
  }
  r.reduce();
  return r;
}

CycScalar CycScalar::abs2() const { return *this * conjugate(); }

bool CycScalar::operator==(const CycScalar& o) const {
  check_same_prime(p_, o.p_);
  return terms_ == o.terms_;
}

std::optional<Rational> CycScalar::as_rational() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() != 1) return std::nullopt;
  const auto& [key, q] = *terms_.begin();
  if (key.first != 0 || sgn(key.second) != 0) return std::nullopt;
  return q;
}

bool CycScalar::is_real() const { return *this == conjugate(); }

namespace {

// Polynomials over Q, ascending coefficients, no trailing zeros.
using Poly = std::vector<Rational>;

void poly_trim(Poly& a) {
  while (!a.empty() && sgn(a.back()) == 0) a.pop_back();
}

Poly poly_sub_scaled(const Poly& a, const Poly& b, const Rational& c,
                     std::size_t shift) {
  // a - c * x^shift * b
  Poly r = a;
  if (r.size() < b.size() + shift) r.resize(b.size() + shift, Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) r[i + shift] -= c * b[i];
  poly_trim(r);
  return r;
}

// Returns {quotient, remainder} of a / b.
std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b) {
  if (b.empty()) throw std::logic_error("polynomial division by zero");
  Poly rem = a, quot;
  poly_trim(rem);
  if (rem.size() >= b.size()) quot.assign(rem.size() - b.size() + 1, Rational(0));
  while (rem.size() >= b.size() && !rem.empty()) {
    Rational c = rem.back() / b.back();
    std::size_t shift = rem.size() - b.size();
    quot[shift] = c;
    rem = poly_sub_scaled(rem, b, c, shift);
  }
  poly_trim(quot);
  return {quot, rem};
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  poly_trim(r);
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r = a;
  if (r.size() < b.size()) r.resize(b.size(), Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  poly_trim(r);
  return r;
}

}  // namespace

CycScalar CycScalar::inverse() const {
  if (terms_.empty()) throw std::domain_error("inverse of zero");

  bool has_h1 = false;
  for (const auto& [key, q] : terms_)
    if (key.first == 1) has_h1 = true;

  if (has_h1) {
    // z = A + sqrt(p) B with A, B in Q(zeta): (A + sqrt(p) B)(A - sqrt(p) B)
    // is sqrt(p)-free, reducing to the cyclotomic case.
    CycScalar flip(p_);
    for (const auto& [key, q] : terms_)
      flip.terms_[key] = (key.first == 1) ? -q : q;
    CycScalar d = *this * flip;
    bool d_pure = true;
    for (const auto& [key, q] : d.terms_)
      if (key.first == 1) d_pure = false;
    if (!d_pure) throw std::logic_error("sqrt(p) part failed to cancel");
    if (d.is_zero())
      throw std::domain_error(
          "inverse not represented: sqrt(p) degeneracy of the parity split");
    return flip * d.inverse();
  }

  long long m = 0;
  for (const auto& [key, q] : terms_)
    m = std::max(m, angle_level(p_, key.second));
  if (m == 0) {
    const Rational& q = terms_.begin()->second;
    return CycScalar(p_, Rational(1) / q);
  }

  Integer big_n = pow_integer(p_, m);
  Integer step_z = pow_integer(p_, m - 1);
  Integer phi_z = big_n - step_z;
  if (!phi_z.fits_slong_p())
    throw std::domain_error("cyclotomic level too deep to invert");
  auto phi = static_cast<std::size_t>(phi_z.get_si());
  auto step = static_cast<std::size_t>(step_z.get_si());

  Poly a(phi, Rational(0));
  for (const auto& [key, q] : terms_) {
    Integer e = key.second.get_num() * (big_n / key.second.get_den());
    a[static_cast<std::size_t>(e.get_si())] = q;
  }
  poly_trim(a);

  Poly modulus(phi + 1, Rational(0));  // Phi_{p^m}(x) = sum_t x^{t p^{m-1}}
  for (long t = 0; t < p_; ++t) modulus[static_cast<std::size_t>(t) * step] = 1;

  // Extended Euclid: maintain r_i = u_i * a (mod modulus); the gcd is a
  // nonzero constant because Phi_{p^m} is irreducible over Q.
  Poly r0 = modulus, r1 = a;
  Poly u0, u1 = {Rational(1)};
  while (r1.size() > 1) {
    auto [quot, rem] = poly_divmod(r0, r1);
    Poly u2 = poly_sub(u0, poly_mul(quot, u1));
    r0 = std::move(r1);
    r1 = std::move(rem);
    u0 = std::move(u1);
    u1 = std::move(u2);
    if (r1.empty()) throw std::logic_error("unexpected gcd collapse");
  }
  Rational g = r1[0];
  Poly inv = poly_divmod(u1, modulus).second;
  for (auto& c : inv) c /= g;

  CycScalar out(p_);
  for (std::size_t e = 0; e < inv.size(); ++e) {
    if (sgn(inv[e]) == 0) continue;
    Rational angle(Integer(static_cast<unsigned long>(e)), big_n);
    angle.canonicalize();
    out.terms_[{0, angle}] = inv[e];
  }
  out.reduce();
  return out;
}

namespace {

// Shared core: evaluate into mpfr accumulators, returning a crude upper
// bound on sum |q| p^{h/2} for error accounting.
double eval_mpfr(const CycScalar::TermMap& terms, long p, mpfr_prec_t prec,
                 mpfr_t re, mpfr_t im) {
  mpfr_set_zero(re, 1);
  mpfr_set_zero(im, 1);
  mpfr_t two_pi, ang, c, s, coeff, sqp;
  mpfr_inits2(prec, two_pi, ang, c, s, coeff, sqp, (mpfr_ptr) nullptr);
  mpfr_const_pi(two_pi, MPFR_RNDN);
  mpfr_mul_ui(two_pi, two_pi, 2, MPFR_RNDN);
  mpfr_sqrt_ui(sqp, static_cast<unsigned long>(p), MPFR_RNDN);
  double weight = 0.0;
  for (const auto& [key, q] : terms) {
    mpfr_mul_q(ang, two_pi, const_cast<mpq_ptr>(key.second.get_mpq_t()),
               MPFR_RNDN);
    mpfr_sin_cos(s, c, ang, MPFR_RNDN);
    mpfr_set_q(coeff, const_cast<mpq_ptr>(q.get_mpq_t()), MPFR_RNDN);
    if (key.first == 1) mpfr_mul(coeff, coeff, sqp, MPFR_RNDN);
    mpfr_fma(re, coeff, c, re, MPFR_RNDN);
    mpfr_fma(im, coeff, s, im, MPFR_RNDN);
    double qd = std::abs(mpq_get_d(q.get_mpq_t()));
    weight += (key.first == 1) ? qd * std::sqrt(static_cast<double>(p)) : qd;
  }
  mpfr_clears(two_pi, ang, c, s, coeff, sqp, (mpfr_ptr) nullptr);
  return weight;
}

}  // namespace

std::pair<double, double> CycScalar::approx_eval(long precision_bits) const {
  mpfr_prec_t prec = std::clamp<long>(precision_bits, 24, 8192) + 32;
  mpfr_t re, im;
  mpfr_inits2(prec, re, im, (mpfr_ptr) nullptr);
  eval_mpfr(terms_, p_, prec, re, im);
  std::pair<double, double> out{mpfr_get_d(re, MPFR_RNDN),
                                mpfr_get_d(im, MPFR_RNDN)};
  mpfr_clears(re, im, (mpfr_ptr) nullptr);
  return out;
}

double CycScalar::approx_abs(long precision_bits) const {
  auto [re, im] = approx_eval(precision_bits);
  return std::hypot(re, im);
}

int CycScalar::sign_real() const {
  if (auto q = as_rational()) return sgn(*q);
  if (!is_real()) throw std::invalid_argument("sign of a non-real scalar");
  for (mpfr_prec_t prec = 128; prec <= 4096; prec *= 2) {
    mpfr_t re, im;
    mpfr_inits2(prec, re, im, (mpfr_ptr) nullptr);
    double weight = eval_mpfr(terms_, p_, prec, re, im);
    double val = mpfr_get_d(re, MPFR_RNDN);
    mpfr_clears(re, im, (mpfr_ptr) nullptr);
    double err =
        (weight + 1.0) * std::ldexp(1.0, -static_cast<int>(prec - 16));
    if (std::abs(val) > err) return val > 0 ? 1 : -1;
  }
  throw std::domain_error("sign not certified at 4096 bits");
}

std::string CycScalar::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, q] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << q.get_str() << ")";
    if (key.first == 1) os << "*sqrt(" << p_ << ")";
    if (sgn(key.second) != 0) os << "*e(" << key.second.get_str() << ")";
  }
  return os.str();
}

}  // namespace qpframe
