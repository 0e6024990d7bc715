#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace dioph {

// Owning wrapper around an mpfr_t.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 128);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
  // Exact value; requires a finite number.
  mpq_class to_rational() const;
  std::string to_string(int digits = 20) const;

 private:
  mpfr_t v_;
};

// Closed interval [lo, hi] with outward (directed) rounding on every operation.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 128);
  static Interval point(const mpq_class& v, mpfr_prec_t prec);
  static Interval point(long v, mpfr_prec_t prec);
  static Interval hull(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t prec);

  const BigFloat& lower() const { return lo_; }
  const BigFloat& upper() const { return hi_; }
  BigFloat& lower() { return lo_; }
  BigFloat& upper() { return hi_; }
  mpfr_prec_t precision() const { return lo_.precision(); }

  bool contains(const mpq_class& v) const;
  bool certainly_positive() const { return mpfr_sgn(lo_.get()) > 0; }
  bool certainly_negative() const { return mpfr_sgn(hi_.get()) < 0; }
  bool certainly_less(const Interval& o) const { return mpfr_less_p(hi_.get(), o.lo_.get()) != 0; }
  bool certainly_greater(const Interval& o) const { return o.certainly_less(*this); }
  bool overlaps(const Interval& o) const;
  double mid() const;
  // upper - lower rounded up
  double width() const;
  std::string to_string(int digits = 20) const;

 private:
  BigFloat lo_, hi_;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);

Interval log(const Interval& a);
Interval exp(const Interval& a);
Interval sqrt(const Interval& a);
Interval rootn(const Interval& a, unsigned long n);
Interval pow_si(const Interval& a, long n);
// a^e for a > 0 and rational e.
Interval pow_q(const Interval& a, const mpq_class& e);
Interval max(const Interval& a, const Interval& b);
Interval min(const Interval& a, const Interval& b);

}  // namespace dioph
