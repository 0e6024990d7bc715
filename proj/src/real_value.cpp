#include "dioph/real_value.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace dioph {

namespace {

mpq_class qpow(const mpq_class& v, unsigned long n) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), v.get_num_mpz_t(), n);
  mpz_pow_ui(den.get_mpz_t(), v.get_den_mpz_t(), n);
  mpq_class out(num, den);
  out.canonicalize();
  return out;
}

mpq_class qpow_signed(const mpq_class& v, long n) {
  if (n >= 0) return qpow(v, static_cast<unsigned long>(n));
  return 1 / qpow(v, static_cast<unsigned long>(-n));
}

// Rough bit size of |v|^L, used to decide whether exact comparison is affordable.
double log2_abs(const mpz_class& v) {
  if (v == 0) return 0;
  return static_cast<double>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

constexpr double kExactBitBudget = 1 << 22;

int compare_by_enclosure(const Real& a, const Real& b, const PrecisionPolicy& policy) {
  for (unsigned bits = policy.initial_bits; bits <= policy.cap_bits; bits *= 2) {
    Interval ia = a.enclosure(bits), ib = b.enclosure(bits);
    if (ia.certainly_less(ib)) return -1;
    if (ib.certainly_less(ia)) return 1;
  }
  fail(ErrorKind::PrecisionExhausted,
       "comparison of " + a.to_string() + " and " + b.to_string() + " undecided at cap");
}

// Exact comparison of a positive monomial ratio against 1; returns 2 when too large.
int compare_ratio_to_one(const Real& ratio) {
  if (ratio.is_rational()) return cmp(ratio.rational(), 1) < 0 ? -1 : (ratio.rational() == 1 ? 0 : 1);
  mpz_class L = 1;
  for (const auto& f : ratio.factors()) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), f.second.get_den_mpz_t());
  if (!L.fits_ulong_p()) return 2;
  const unsigned long l = L.get_ui();
  double cost = l * (log2_abs(ratio.coeff().get_num()) + log2_abs(ratio.coeff().get_den()));
  for (const auto& f : ratio.factors())
    cost += std::abs(mpq_class(f.second * l).get_d()) * log2_abs(f.first);
  if (cost > kExactBitBudget) return 2;
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), ratio.coeff().get_num_mpz_t(), l);
  mpz_pow_ui(den.get_mpz_t(), ratio.coeff().get_den_mpz_t(), l);
  mpz_class p;
  for (const auto& f : ratio.factors()) {
    mpq_class e = f.second * l;
    const mpz_class& n = e.get_num();
    mpz_pow_ui(p.get_mpz_t(), f.first.get_mpz_t(), mpz_class(abs(n)).get_ui());
    if (n > 0) num *= p; else den *= p;
  }
  const int c = cmp(num, den);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

Real Real::power(const mpz_class& base, const mpq_class& exponent, const mpq_class& coeff) {
  if (base < 1) fail(ErrorKind::Domain, "monomial base must be a positive integer");
  Real r;
  r.kind_ = Kind::Monomial;
  r.coeff_ = coeff;
  r.factors_.push_back({base, exponent});
  r.normalize();
  return r;
}

Real Real::transcendental(std::string description, Evaluator eval) {
  Real r;
  r.kind_ = Kind::Transcendental;
  r.description_ = std::move(description);
  r.eval_ = std::make_shared<const Evaluator>(std::move(eval));
  return r;
}

Real Real::max(const Real& a, const Real& b) {
  if (a.is_algebraic() && b.is_algebraic()) {
    return compare(a, b) >= 0 ? a : b;
  }
  Real r;
  r.kind_ = Kind::Max;
  r.left_ = std::make_shared<const Real>(a);
  r.right_ = std::make_shared<const Real>(b);
  return r;
}

const mpq_class& Real::rational() const {
  if (kind_ != Kind::Rational) fail(ErrorKind::InvalidInput, "value " + to_string() + " is not rational");
  return coeff_;
}

void Real::normalize() {
  if (kind_ != Kind::Monomial) return;
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<mpz_class, mpq_class> merged;
    for (auto& f : factors_) {
      if (f.first == 1 || f.second == 0) continue;
      merged[f.first] += f.second;
    }
    factors_.clear();
    for (auto& [base, e] : merged) {
      if (e == 0) continue;
      // split the exponent into integer and fractional parts
      mpz_class n;
      mpz_fdiv_q(n.get_mpz_t(), e.get_num_mpz_t(), e.get_den_mpz_t());
      mpq_class frac = e - mpq_class(n);
      if (n != 0) {
        if (!n.fits_slong_p()) fail(ErrorKind::InvalidInput, "monomial exponent too large");
        coeff_ *= qpow_signed(mpq_class(base), n.get_si());
      }
      if (frac == 0) continue;
      // base = a^k with k | den(frac) lowers the root order
      const unsigned long den = frac.get_den().get_ui();
      bool reduced = false;
      for (unsigned long k = 2; k <= std::min(den, 64UL) && !reduced; ++k) {
        if (den % k != 0) continue;
        mpz_class a;
        if (mpz_root(a.get_mpz_t(), base.get_mpz_t(), k) != 0) {
          factors_.push_back({a, frac * k});
          reduced = true;
          changed = true;
        }
      }
      if (!reduced) factors_.push_back({base, frac});
    }
  }
  if (coeff_ == 0) factors_.clear();
  if (factors_.empty()) kind_ = Kind::Rational;
}

Interval Real::enclosure(mpfr_prec_t prec) const {
  switch (kind_) {
    case Kind::Rational:
      return Interval::point(coeff_, prec);
    case Kind::Monomial: {
      Interval acc = Interval::point(coeff_, prec);
      for (const auto& f : factors_) acc = acc * pow_q(Interval::point(mpq_class(f.first), prec), f.second);
      return acc;
    }
    case Kind::Transcendental:
      return (*eval_)(prec);
    case Kind::Max:
      return dioph::max(left_->enclosure(prec), right_->enclosure(prec));
  }
  return Interval(prec);
}

double Real::approx() const {
  if (kind_ == Kind::Rational) return coeff_.get_d();
  return enclosure(96).mid();
}

std::string Real::to_string() const {
  switch (kind_) {
    case Kind::Rational:
      return coeff_.get_str();
    case Kind::Monomial: {
      std::ostringstream os;
      os << coeff_.get_str();
      for (const auto& f : factors_) os << "*" << f.first.get_str() << "^(" << f.second.get_str() << ")";
      return os.str();
    }
    case Kind::Transcendental:
      return description_;
    case Kind::Max:
      return "max(" + left_->to_string() + "," + right_->to_string() + ")";
  }
  return {};
}

Real Real::operator*(const Real& o) const {
  if (is_algebraic() && o.is_algebraic()) {
    Real r;
    r.kind_ = Kind::Monomial;
    r.coeff_ = coeff_ * o.coeff_;
    r.factors_ = factors_;
    r.factors_.insert(r.factors_.end(), o.factors_.begin(), o.factors_.end());
    r.normalize();
    return r;
  }
  Real a = *this, b = o;
  return transcendental("(" + a.to_string() + ")*(" + b.to_string() + ")",
                        [a, b](mpfr_prec_t p) { return a.enclosure(p) * b.enclosure(p); });
}

Real Real::pow(long n) const {
  if (is_algebraic()) {
    Real r;
    r.kind_ = Kind::Monomial;
    r.coeff_ = qpow_signed(coeff_, n);
    for (const auto& f : factors_) r.factors_.push_back({f.first, f.second * n});
    r.normalize();
    return r;
  }
  Real a = *this;
  return transcendental("(" + a.to_string() + ")^" + std::to_string(n),
                        [a, n](mpfr_prec_t p) { return pow_si(a.enclosure(p), n); });
}

int compare(const Real& a, const Real& b, const PrecisionPolicy& policy) {
  if (a.kind() == Real::Kind::Max)
    return std::max(compare(a.left(), b, policy), compare(a.right(), b, policy));
  if (b.kind() == Real::Kind::Max)
    return std::min(compare(a, b.left(), policy), compare(a, b.right(), policy));
  // transcendental descriptions name the function and argument, so equal text means equal value
  if (a.kind() == Real::Kind::Transcendental && b.kind() == Real::Kind::Transcendental &&
      a.to_string() == b.to_string())
    return 0;
  if (a.is_algebraic() && b.is_algebraic()) {
    const int sa = sgn(a.coeff()), sb = sgn(b.coeff());
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    Real ratio = a * b.pow(-1);
    int c = compare_ratio_to_one(ratio);
    if (c != 2) return sa > 0 ? c : -c;
  }
  return compare_by_enclosure(a, b, policy);
}

bool less_than(const Surd& z, const Real& t, const PrecisionPolicy& policy) {
  switch (t.kind()) {
    case Real::Kind::Rational:
      return (z - Surd(t.rational())).sign(policy) < 0;
    case Real::Kind::Max:
      return less_than(z, t.left(), policy) || less_than(z, t.right(), policy);
    case Real::Kind::Monomial: {
      for (unsigned bits = 128; bits <= 512; bits *= 2) {
        Interval zi = z.enclosure(bits), ti = t.enclosure(bits);
        if (zi.certainly_less(ti)) return true;
        if (mpfr_lessequal_p(ti.upper().get(), zi.lower().get())) return false;
      }
      const int sz = z.sign(policy), st = sgn(t.coeff());
      if (sz <= 0 && st > 0) return true;
      if (z.terms().size() <= 1 && sz > 0 && st > 0) {
        mpz_class L = 1;
        for (const auto& f : t.factors()) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), f.second.get_den_mpz_t());
        if (L.fits_ulong_p() && L <= 4096) {
          Real tl = t.pow(L.get_si());
          return (z.pow(static_cast<unsigned>(L.get_ui())) - Surd(tl.rational())).sign(policy) < 0;
        }
      }
      break;
    }
    case Real::Kind::Transcendental:
      break;
  }
  for (unsigned bits = policy.initial_bits; bits <= policy.cap_bits; bits *= 2) {
    Interval zi = z.enclosure(bits), ti = t.enclosure(bits);
    if (zi.certainly_less(ti)) return true;
    if (mpfr_lessequal_p(ti.upper().get(), zi.lower().get())) return false;
  }
  fail(ErrorKind::PrecisionExhausted,
       "comparison " + z.to_string() + " < " + t.to_string() + " undecided at cap");
}

void scaled_bounds(const Real& t, unsigned bits, mpz_class& lo, mpz_class& hi) {
  if (t.is_rational()) {
    mpz_class num = t.rational().get_num();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
    mpz_fdiv_q(lo.get_mpz_t(), num.get_mpz_t(), t.rational().get_den_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), num.get_mpz_t(), t.rational().get_den_mpz_t());
    return;
  }
  Interval e = t.enclosure(bits + 64);
  BigFloat s(bits + 64);
  mpfr_mul_2ui(s.get(), e.lower().get(), bits, MPFR_RNDD);
  mpfr_get_z(lo.get_mpz_t(), s.get(), MPFR_RNDD);
  mpfr_mul_2ui(s.get(), e.upper().get(), bits, MPFR_RNDU);
  mpfr_get_z(hi.get_mpz_t(), s.get(), MPFR_RNDU);
}

}  // namespace dioph
