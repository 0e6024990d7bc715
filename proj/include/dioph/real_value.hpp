#pragma once

#include <gmpxx.h>

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/interval.hpp"
#include "dioph/surd.hpp"

namespace dioph {

// A positive-or-zero real threshold. Rational and monomial values
// (coeff·Π base^exponent, rational exponents) compare exactly; transcendental
// values compare by enclosure refinement.
class Real {
 public:
  enum class Kind { Rational, Monomial, Transcendental, Max };
  using Evaluator = std::function<Interval(mpfr_prec_t)>;

  Real() : kind_(Kind::Rational) {}
  Real(const mpq_class& v) : kind_(Kind::Rational), coeff_(v) {}
  Real(long v) : kind_(Kind::Rational), coeff_(v) {}

  // coeff·base^exponent with base ≥ 1
  static Real power(const mpz_class& base, const mpq_class& exponent, const mpq_class& coeff = 1);
  static Real transcendental(std::string description, Evaluator eval);
  static Real max(const Real& a, const Real& b);

  Kind kind() const { return kind_; }
  bool is_rational() const { return kind_ == Kind::Rational; }
  bool is_algebraic() const { return kind_ == Kind::Rational || kind_ == Kind::Monomial; }
  const mpq_class& rational() const;

  Interval enclosure(mpfr_prec_t prec) const;
  double approx() const;
  std::string to_string() const;

  // Products and powers stay exact for algebraic operands.
  Real operator*(const Real& o) const;
  Real pow(long n) const;

  // Monomial internals.
  const mpq_class& coeff() const { return coeff_; }
  const std::vector<std::pair<mpz_class, mpq_class>>& factors() const { return factors_; }
  // Max operands.
  const Real& left() const { return *left_; }
  const Real& right() const { return *right_; }

 private:
  void normalize();

  Kind kind_;
  mpq_class coeff_;
  std::vector<std::pair<mpz_class, mpq_class>> factors_;
  std::string description_;
  std::shared_ptr<const Evaluator> eval_;
  std::shared_ptr<const Real> left_, right_;
};

// -1, 0, 1; equality is only ever reported for algebraic operands.
int compare(const Real& a, const Real& b, const PrecisionPolicy& policy = {});

// z < t, certified (strict).
bool less_than(const Surd& z, const Real& t, const PrecisionPolicy& policy = {});

// Lower/upper rational bounds of t·2^bits, floor/ceil.
void scaled_bounds(const Real& t, unsigned bits, mpz_class& lo, mpz_class& hi);

}  // namespace dioph
