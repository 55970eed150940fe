#include "qpframe/padic.hpp"

#include <limits>
#include <stdexcept>
#include <utility>

namespace qpframe {

namespace {

void check_prime(long p) {
  if (p < 2) throw std::invalid_argument("prime must be >= 2");
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) throw std::invalid_argument("p is not prime");
}

void check_same_prime(long a, long b) {
  if (a != b) throw std::invalid_argument("mixed primes");
}

}  // namespace

Rational pow_rational(long p, long long e) {
  Integer num = 1, den = 1;
  if (e >= 0)
    mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(e));
  else
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(-e));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Integer pow_integer(long p, long long e) {
  if (e < 0) throw std::invalid_argument("negative exponent for integer power");
  Integer n;
  mpz_ui_pow_ui(n.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(e));
  return n;
}

PadicRational::PadicRational(long p) : p_(p), u_(0), v_(0) { check_prime(p); }

PadicRational::PadicRational(long p, Integer u, long long v)
    : p_(p), u_(std::move(u)), v_(v) {
  check_prime(p);
  normalize();
}

PadicRational::PadicRational(long p, long n) : p_(p), u_(n), v_(0) {
  check_prime(p);
  normalize();
}

void PadicRational::normalize() {
  if (u_ == 0) {
    v_ = 0;
    return;
  }
  // Strip p factors out of the unit into the exponent.
  v_ += static_cast<long long>(
      mpz_remove(u_.get_mpz_t(), u_.get_mpz_t(), Integer(p_).get_mpz_t()));
}

PadicRational PadicRational::from_rational(long p, const Rational& q) {
  Rational c = q;
  c.canonicalize();
  Integer num = c.get_num(), den = c.get_den();
  long long v = 0;
  if (num != 0)
    v += static_cast<long long>(
        mpz_remove(num.get_mpz_t(), num.get_mpz_t(), Integer(p).get_mpz_t()));
  v -= static_cast<long long>(
      mpz_remove(den.get_mpz_t(), den.get_mpz_t(), Integer(p).get_mpz_t()));
  if (den != 1)
    throw std::domain_error("rational is not in Z[1/p]: denominator " +
                            den.get_str());
  return PadicRational(p, num, v);
}

PadicRational PadicRational::parse(long p, const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty p-adic literal");
  if (text == "0") return PadicRational(p);
  auto star = text.find('*');
  if (star == std::string::npos) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      Rational q(text);
      q.canonicalize();
      return from_rational(p, q);
    }
    return PadicRational(p, Integer(text), 0);
  }
  // u*p^v
  Integer u(text.substr(0, star));
  std::string rest = text.substr(star + 1);
  auto caret = rest.find('^');
  if (caret == std::string::npos)
    throw std::invalid_argument("expected u*p^v, got " + text);
  long base = std::stol(rest.substr(0, caret));
  check_same_prime(base, p);
  long long v = std::stoll(rest.substr(caret + 1));
  return PadicRational(p, u, v);
}

std::optional<long long> PadicRational::valuation() const {
  if (is_zero()) return std::nullopt;
  return v_;
}

Rational PadicRational::norm_exact() const {
  if (is_zero()) return Rational(0);
  return pow_rational(p_, -v_);
}

Rational PadicRational::value() const {
  Rational r = pow_rational(p_, v_);
  r *= Rational(u_);
  r.canonicalize();
  return r;
}

Rational PadicRational::frac_part() const {
  if (is_zero() || v_ >= 0) return Rational(0);
  Integer modulus = pow_integer(p_, -v_);
  Integer rep;
  mpz_mod(rep.get_mpz_t(), u_.get_mpz_t(), modulus.get_mpz_t());
  Rational r(rep, modulus);
  r.canonicalize();
  return r;
}

PadicRational PadicRational::frac_part_padic() const { return truncate_at(0); }

PadicRational PadicRational::truncate_at(long long g) const {
  if (is_zero() || v_ >= g) return PadicRational(p_);
  Integer modulus = pow_integer(p_, g - v_);
  Integer rep;
  mpz_mod(rep.get_mpz_t(), u_.get_mpz_t(), modulus.get_mpz_t());
  return PadicRational(p_, rep, v_);
}

PadicRational PadicRational::shift(long long k) const {
  if (is_zero()) return *this;
  return PadicRational(p_, u_, v_ + k);
}

PadicRational PadicRational::operator-() const {
  if (is_zero()) return *this;
  return PadicRational(p_, -u_, v_);
}

PadicRational PadicRational::operator+(const PadicRational& o) const {
  check_same_prime(p_, o.p_);
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  long long v = std::min(v_, o.v_);
  Integer s = u_ * pow_integer(p_, v_ - v) + o.u_ * pow_integer(p_, o.v_ - v);
  return PadicRational(p_, s, v);
}

PadicRational PadicRational::operator-(const PadicRational& o) const {
  return *this + (-o);
}

PadicRational PadicRational::operator*(const PadicRational& o) const {
  check_same_prime(p_, o.p_);
  if (is_zero() || o.is_zero()) return PadicRational(p_);
  return PadicRational(p_, u_ * o.u_, v_ + o.v_);
}

bool PadicRational::operator==(const PadicRational& o) const {
  check_same_prime(p_, o.p_);
  return u_ == o.u_ && v_ == o.v_;
}

bool PadicRational::operator<(const PadicRational& o) const {
  check_same_prime(p_, o.p_);
  if (is_zero() != o.is_zero()) return is_zero();
  if (v_ != o.v_) return v_ > o.v_;
  return u_ < o.u_;
}

std::string PadicRational::to_string() const {
  if (is_zero()) return "0";
  return u_.get_str() + "*" + std::to_string(p_) + "^" + std::to_string(v_);
}

RationalAngle::RationalAngle() : r_(0) {}

RationalAngle::RationalAngle(const Rational& turns) : r_(turns) {
  r_.canonicalize();
  // Reduce modulo 1 into [0,1).
  Integer whole;
  mpz_fdiv_q(whole.get_mpz_t(), r_.get_num().get_mpz_t(),
             r_.get_den().get_mpz_t());
  r_ -= Rational(whole);
  r_.canonicalize();
}

RationalAngle RationalAngle::parse(const std::string& text) {
  Rational q(text);
  q.canonicalize();
  return RationalAngle(q);
}

RationalAngle RationalAngle::operator+(const RationalAngle& o) const {
  return RationalAngle(r_ + o.r_);
}

RationalAngle RationalAngle::operator-() const { return RationalAngle(-r_); }

RationalAngle RationalAngle::scaled(const Integer& n) const {
  return RationalAngle(r_ * Rational(n));
}

long long RationalAngle::denominator_exponent(long p) const {
  Integer den = r_.get_den();
  long long m = static_cast<long long>(
      mpz_remove(den.get_mpz_t(), den.get_mpz_t(), Integer(p).get_mpz_t()));
  if (den != 1)
    throw std::domain_error("angle denominator is not a power of p");
  return m;
}

std::string RationalAngle::to_string() const { return r_.get_str(); }

RationalAngle character_angle(const PadicRational& x) {
  return RationalAngle(x.frac_part());
}

Ball::Ball(long long gamma, const PadicRational& center)
    : gamma_(gamma), center_(center.truncate_at(-gamma)) {}

Rational Ball::measure() const { return pow_rational(prime(), gamma_); }

bool Ball::contains(const PadicRational& x) const {
  auto v = (x - center_).valuation();
  return !v.has_value() || *v >= -gamma_;
}

std::vector<Ball> Ball::children() const {
  std::vector<Ball> out;
  out.reserve(static_cast<size_t>(prime()));
  for (long i = 0; i < prime(); ++i) {
    PadicRational offset = PadicRational(prime(), i).shift(-gamma_);
    out.emplace_back(gamma_ - 1, center_ + offset);
  }
  return out;
}

BallRelation Ball::relation(const Ball& o) const {
  check_same_prime(prime(), o.prime());
  auto d = (center_ - o.center_).valuation();
  long long big = std::max(gamma_, o.gamma_);
  bool meet = !d.has_value() || *d >= -big;  // centers within the bigger radius
  if (!meet) return BallRelation::Disjoint;
  if (gamma_ == o.gamma_) return BallRelation::Equal;
  return gamma_ > o.gamma_ ? BallRelation::SecondInsideFirst
                           : BallRelation::FirstInsideSecond;
}

Ball Ball::enclosing(const Ball& a, const Ball& b) {
  check_same_prime(a.prime(), b.prime());
  long long g = std::max(a.gamma_, b.gamma_);
  auto d = (a.center_ - b.center_).valuation();
  if (d.has_value()) g = std::max(g, -*d);
  return Ball(g, a.center_);
}

long long Ball::enclosing_exponent_at_zero() const {
  long long g = gamma_;
  auto v = center_.valuation();
  if (v.has_value()) g = std::max(g, -*v);
  return g;
}

std::vector<PadicRational> Ball::ip_representatives() const {
  std::vector<PadicRational> out;
  if (gamma_ <= 0) {
    PadicRational rep = center_.frac_part_padic();
    if (contains(rep)) out.push_back(rep);
    return out;
  }
  // Walk down to unit balls; each carries exactly one I_p point.
  std::vector<Ball> layer{*this};
  while (layer.front().gamma() > 0) {
    std::vector<Ball> next;
    next.reserve(layer.size() * static_cast<size_t>(prime()));
    for (const Ball& b : layer)
      for (Ball& c : b.children()) next.push_back(std::move(c));
    layer = std::move(next);
  }
  out.reserve(layer.size());
  for (const Ball& b : layer) out.push_back(b.center().frac_part_padic());
  return out;
}

bool Ball::operator==(const Ball& o) const {
  check_same_prime(prime(), o.prime());
  return gamma_ == o.gamma_ && center_ == o.center_;
}

bool Ball::operator<(const Ball& o) const {
  if (gamma_ != o.gamma_) return gamma_ < o.gamma_;
  return center_ < o.center_;
}

std::string Ball::to_string() const {
  return "B_" + std::to_string(gamma_) + "(" + center_.to_string() + ")";
}

}  // namespace qpframe
