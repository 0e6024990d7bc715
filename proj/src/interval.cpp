#include "dioph/interval.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

#include "dioph/errors.hpp"

namespace dioph {

BigFloat::BigFloat(mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

mpq_class BigFloat::to_rational() const {
  if (!mpfr_number_p(v_)) fail(ErrorKind::Domain, "non-finite value has no rational form");
  mpq_class out;
  mpfr_get_q(out.get_mpq_t(), v_);
  return out;
}

std::string BigFloat::to_string(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Interval::Interval(mpfr_prec_t prec) : lo_(prec), hi_(prec) {}

Interval Interval::point(const mpq_class& v, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_.get(), v.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_.get(), v.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::point(long v, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_si(r.lo_.get(), v, MPFR_RNDD);
  mpfr_set_si(r.hi_.get(), v, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_.get(), lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_.get(), hi.get_mpq_t(), MPFR_RNDU);
  return r;
}

bool Interval::contains(const mpq_class& v) const {
  return mpfr_cmp_q(lo_.get(), v.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), v.get_mpq_t()) >= 0;
}

bool Interval::overlaps(const Interval& o) const {
  return mpfr_lessequal_p(lo_.get(), o.hi_.get()) && mpfr_lessequal_p(o.lo_.get(), hi_.get());
}

double Interval::mid() const {
  BigFloat m(precision() + 1);
  mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
  mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
  return m.to_double();
}

double Interval::width() const {
  BigFloat w(precision());
  mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
  return w.to_double(MPFR_RNDU);
}

std::string Interval::to_string(int digits) const {
  return "[" + lo_.to_string(digits) + "," + hi_.to_string(digits) + "]";
}

namespace {

mpfr_prec_t joint(const Interval& a, const Interval& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_add(r.lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_add(r.upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_sub(r.lower().get(), a.lower().get(), b.upper().get(), MPFR_RNDD);
  mpfr_sub(r.upper().get(), a.upper().get(), b.lower().get(), MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a) {
  Interval r(a.precision());
  mpfr_neg(r.lower().get(), a.upper().get(), MPFR_RNDD);
  mpfr_neg(r.upper().get(), a.lower().get(), MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  const mpfr_prec_t p = joint(a, b);
  Interval r(p);
  BigFloat t(p);
  mpfr_srcptr xs[2] = {a.lower().get(), a.upper().get()};
  mpfr_srcptr ys[2] = {b.lower().get(), b.upper().get()};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_mul(t.get(), x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lower().get())) mpfr_set(r.lower().get(), t.get(), MPFR_RNDD);
      mpfr_mul(t.get(), x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.upper().get())) mpfr_set(r.upper().get(), t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (!b.certainly_positive() && !b.certainly_negative())
    fail(ErrorKind::Domain, "interval division by an interval containing zero");
  const mpfr_prec_t p = joint(a, b);
  Interval r(p);
  BigFloat t(p);
  mpfr_srcptr xs[2] = {a.lower().get(), a.upper().get()};
  mpfr_srcptr ys[2] = {b.lower().get(), b.upper().get()};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_div(t.get(), x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lower().get())) mpfr_set(r.lower().get(), t.get(), MPFR_RNDD);
      mpfr_div(t.get(), x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.upper().get())) mpfr_set(r.upper().get(), t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

Interval log(const Interval& a) {
  if (!a.certainly_positive()) fail(ErrorKind::Domain, "log of a non-positive interval");
  Interval r(a.precision());
  mpfr_log(r.lower().get(), a.lower().get(), MPFR_RNDD);
  mpfr_log(r.upper().get(), a.upper().get(), MPFR_RNDU);
  return r;
}

Interval exp(const Interval& a) {
  Interval r(a.precision());
  mpfr_exp(r.lower().get(), a.lower().get(), MPFR_RNDD);
  mpfr_exp(r.upper().get(), a.upper().get(), MPFR_RNDU);
  return r;
}

Interval sqrt(const Interval& a) { return rootn(a, 2); }

Interval rootn(const Interval& a, unsigned long n) {
  if (mpfr_sgn(a.lower().get()) < 0) fail(ErrorKind::Domain, "root of a negative interval");
  Interval r(a.precision());
  mpfr_rootn_ui(r.lower().get(), a.lower().get(), n, MPFR_RNDD);
  mpfr_rootn_ui(r.upper().get(), a.upper().get(), n, MPFR_RNDU);
  return r;
}

Interval pow_si(const Interval& a, long n) {
  if (n == 0) return Interval::point(1, a.precision());
  if (!a.certainly_positive()) fail(ErrorKind::Domain, "power of a non-positive interval");
  Interval r(a.precision());
  if (n > 0) {
    mpfr_pow_si(r.lower().get(), a.lower().get(), n, MPFR_RNDD);
    mpfr_pow_si(r.upper().get(), a.upper().get(), n, MPFR_RNDU);
  } else {
    mpfr_pow_si(r.lower().get(), a.upper().get(), n, MPFR_RNDD);
    mpfr_pow_si(r.upper().get(), a.lower().get(), n, MPFR_RNDU);
  }
  return r;
}

Interval pow_q(const Interval& a, const mpq_class& e) {
  if (!a.certainly_positive()) fail(ErrorKind::Domain, "rational power of a non-positive interval");
  if (!e.get_num().fits_slong_p() || !e.get_den().fits_ulong_p())
    fail(ErrorKind::InvalidInput, "exponent too large");
  Interval root = e.get_den() == 1 ? a : rootn(a, e.get_den().get_ui());
  return pow_si(root, e.get_num().get_si());
}

Interval max(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_max(r.lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_max(r.upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

Interval min(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_min(r.lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_min(r.upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

}  // namespace dioph
