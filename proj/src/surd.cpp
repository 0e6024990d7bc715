#include "dioph/surd.hpp"

#include <algorithm>
#include <sstream>

namespace dioph {

namespace {

bool perfect_square(const mpz_class& v, mpz_class& root) {
  if (v < 0) return false;
  if (!mpz_perfect_square_p(v.get_mpz_t())) return false;
  mpz_sqrt(root.get_mpz_t(), v.get_mpz_t());
  return true;
}

void strip_small_squares(mpz_class& radicand, mpq_class& coeff) {
  for (unsigned long p = 2; p < 200; ++p) {
    const unsigned long pp = p * p;
    if (pp > radicand) break;
    while (mpz_divisible_ui_p(radicand.get_mpz_t(), pp)) {
      radicand /= pp;
      coeff *= p;
    }
  }
}

mpz_class fdiv_pow2(const mpz_class& v, unsigned bits) {
  mpz_class out;
  mpz_fdiv_q_2exp(out.get_mpz_t(), v.get_mpz_t(), bits);
  return out;
}

}  // namespace

Surd Surd::root(const mpq_class& coeff, const mpq_class& radicand) {
  if (radicand < 0) fail(ErrorKind::Domain, "square root of a negative number");
  Surd s;
  if (coeff == 0 || radicand == 0) return s;
  // √(a/b) = √(ab)/b
  mpz_class c = radicand.get_num() * radicand.get_den();
  s.add_root(coeff / mpq_class(radicand.get_den()), c);
  return s;
}

void Surd::add_root(const mpq_class& coeff_in, mpz_class c) {
  if (coeff_in == 0) return;
  mpq_class coeff = coeff_in;
  mpz_class r;
  if (perfect_square(c, r)) {
    rational_ += coeff * r;
    return;
  }
  strip_small_squares(c, coeff);
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    mpz_class prod = c * it->radicand;
    if (perfect_square(prod, r)) {
      // √c = (√(c·c1)/c1)·√c1
      mpq_class scale(r, it->radicand);
      scale.canonicalize();
      it->coeff += coeff * scale;
      if (it->coeff == 0) terms_.erase(it);
      return;
    }
  }
  terms_.push_back({c, coeff});
  std::sort(terms_.begin(), terms_.end(),
            [](const SurdTerm& a, const SurdTerm& b) { return a.radicand < b.radicand; });
}

Surd Surd::operator-() const {
  Surd out(*this);
  out.rational_ = -out.rational_;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Surd& Surd::operator+=(const Surd& o) {
  rational_ += o.rational_;
  for (const auto& t : o.terms_) add_root(t.coeff, t.radicand);
  return *this;
}

Surd& Surd::operator-=(const Surd& o) { return *this += -o; }

Surd& Surd::operator*=(const mpq_class& s) {
  if (s == 0) {
    rational_ = 0;
    terms_.clear();
    return *this;
  }
  rational_ *= s;
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

Surd Surd::operator*(const Surd& o) const {
  Surd out(rational_ * o.rational_);
  for (const auto& t : o.terms_) out.add_root(rational_ * t.coeff, t.radicand);
  for (const auto& t : terms_) {
    out.add_root(o.rational_ * t.coeff, t.radicand);
    for (const auto& u : o.terms_) out.add_root(t.coeff * u.coeff, t.radicand * u.radicand);
  }
  return out;
}

Surd Surd::pow(unsigned n) const {
  Surd result(1);
  Surd base(*this);
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

void Surd::scaled_bounds(unsigned bits, mpz_class& lo, mpz_class& hi) const {
  mpz_class num = rational_.get_num();
  mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
  mpz_fdiv_q(lo.get_mpz_t(), num.get_mpz_t(), rational_.get_den().get_mpz_t());
  mpz_cdiv_q(hi.get_mpz_t(), num.get_mpz_t(), rational_.get_den().get_mpz_t());
  mpz_class x, s, s_hi, q;
  for (const auto& t : terms_) {
    const mpz_class& b = t.coeff.get_num();
    const mpz_class& den = t.coeff.get_den();
    x = b * b * t.radicand;
    mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), 2 * bits);
    mpz_sqrt(s.get_mpz_t(), x.get_mpz_t());
    s_hi = s;
    if (s * s != x) s_hi += 1;
    if (b > 0) {
      mpz_fdiv_q(q.get_mpz_t(), s.get_mpz_t(), den.get_mpz_t());
      lo += q;
      mpz_cdiv_q(q.get_mpz_t(), s_hi.get_mpz_t(), den.get_mpz_t());
      hi += q;
    } else {
      mpz_cdiv_q(q.get_mpz_t(), s_hi.get_mpz_t(), den.get_mpz_t());
      lo -= q;
      mpz_fdiv_q(q.get_mpz_t(), s.get_mpz_t(), den.get_mpz_t());
      hi -= q;
    }
  }
}

int Surd::sign(const PrecisionPolicy& policy) const {
  const int sr = sgn(rational_);
  if (terms_.empty()) return sr;
  if (terms_.size() == 1) {
    const int sb = sgn(terms_[0].coeff);
    if (sr == 0 || sr == sb) return sb;
    // opposite signs: compare r^2 with b^2·c; equality is impossible for irrational √c
    mpq_class lhs = rational_ * rational_;
    mpq_class rhs = terms_[0].coeff * terms_[0].coeff * terms_[0].radicand;
    return lhs > rhs ? sr : sb;
  }
  mpz_class lo, hi;
  for (unsigned bits = policy.initial_bits; bits <= policy.cap_bits; bits *= 2) {
    scaled_bounds(bits, lo, hi);
    if (lo > 0) return 1;
    if (hi < 0) return -1;
  }
  fail(ErrorKind::PrecisionExhausted, "sign of " + to_string() + " undecided at cap");
}

mpz_class Surd::floor(const PrecisionPolicy& policy) const {
  if (terms_.empty()) {
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), rational_.get_num_mpz_t(), rational_.get_den_mpz_t());
    return out;
  }
  mpz_class lo, hi;
  for (unsigned bits = 64; bits <= policy.cap_bits; bits *= 2) {
    scaled_bounds(bits, lo, hi);
    mpz_class flo = fdiv_pow2(lo, bits), fhi = fdiv_pow2(hi, bits);
    if (flo == fhi) return flo;
  }
  fail(ErrorKind::PrecisionExhausted, "floor of " + to_string() + " undecided at cap");
}

Interval Surd::enclosure(mpfr_prec_t prec) const {
  Interval acc = Interval::point(rational_, prec);
  for (const auto& t : terms_) {
    Interval r = sqrt(Interval::point(mpq_class(t.radicand), prec));
    acc = acc + Interval::point(t.coeff, prec) * r;
  }
  return acc;
}

double Surd::approx() const { return enclosure(80).mid(); }

std::string Surd::to_string() const {
  std::ostringstream os;
  os << rational_.get_str();
  for (const auto& t : terms_) {
    os << (t.coeff < 0 ? "-" : "+");
    mpq_class a = abs(t.coeff);
    if (a != 1) os << a.get_str() << "*";
    os << "sqrt(" << t.radicand.get_str() << ")";
  }
  return os.str();
}

Surd nearest_int_distance(const Surd& z, const PrecisionPolicy& policy) {
  Surd frac = z - Surd(mpq_class(z.floor(policy)));
  if (frac.is_rational()) {
    mpq_class f = frac.rational_part();
    return Surd(f > mpq_class(1, 2) ? mpq_class(1) - f : f);
  }
  if ((frac - Surd(mpq_class(1, 2))).sign(policy) > 0) return Surd(1) - frac;
  return frac;
}

}  // namespace dioph
