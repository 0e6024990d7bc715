#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/interval.hpp"

namespace dioph {

struct SurdTerm {
  mpz_class radicand;  // > 1, square-free up to small primes, distinct square classes
  mpq_class coeff;     // nonzero
};

// Exact element of Q(√c1, √c2, ...): r + Σ coeff_i·√radicand_i.
class Surd {
 public:
  Surd() = default;
  Surd(const mpq_class& r) : rational_(r) {}
  Surd(long v) : rational_(v) {}

  // coeff·√radicand for a nonnegative rational radicand.
  static Surd root(const mpq_class& coeff, const mpq_class& radicand);

  const mpq_class& rational_part() const { return rational_; }
  const std::vector<SurdTerm>& terms() const { return terms_; }
  bool is_rational() const { return terms_.empty(); }
  bool is_zero() const { return terms_.empty() && rational_ == 0; }

  Surd operator-() const;
  Surd& operator+=(const Surd& o);
  Surd& operator-=(const Surd& o);
  Surd& operator*=(const mpq_class& s);
  Surd operator*(const Surd& o) const;
  Surd pow(unsigned n) const;

  // Exact when at most one radicand is present; otherwise decided by enclosure
  // refinement up to the policy cap.
  int sign(const PrecisionPolicy& policy = {}) const;
  mpz_class floor(const PrecisionPolicy& policy = {}) const;
  // lo <= value·2^bits <= hi
  void scaled_bounds(unsigned bits, mpz_class& lo, mpz_class& hi) const;
  Interval enclosure(mpfr_prec_t prec) const;
  double approx() const;
  std::string to_string() const;

 private:
  void add_root(const mpq_class& coeff, mpz_class radicand);

  mpq_class rational_;
  std::vector<SurdTerm> terms_;
};

inline Surd operator+(Surd a, const Surd& b) { return a += b; }
inline Surd operator-(Surd a, const Surd& b) { return a -= b; }
inline Surd operator*(Surd a, const mpq_class& s) { return a *= s; }

inline int compare(const Surd& a, const Surd& b, const PrecisionPolicy& policy = {}) {
  return (a - b).sign(policy);
}

// ‖z‖ as an exact surd.
Surd nearest_int_distance(const Surd& z, const PrecisionPolicy& policy = {});

}  // namespace dioph
