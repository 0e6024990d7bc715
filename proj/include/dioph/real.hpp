#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/surd.hpp"

namespace dioph {

// lower <= value <= upper with upper - lower <= 2^-precision_bits.
struct CertifiedValue {
  mpq_class lower;
  mpq_class upper;
  unsigned precision_bits = 0;

  bool is_exact() const { return lower == upper; }
  double approx() const;
  // "p/q" for a point, "[lo,hi]" otherwise.
  std::string to_string() const;
};

CertifiedValue certify(const Surd& v, unsigned bits);

class RealExpr {
 public:
  enum class Kind { Rational, Quadratic, Decimal, Named };

  // Grammar: "p/q", "a+b*sqrt(c)", decimal strings, "sqrt2m1", "golden", "liouville10(n)".
  static RealExpr parse(std::string_view literal);
  static RealExpr from_rational(const mpq_class& v);

  Kind kind() const { return kind_; }
  const std::string& literal() const { return literal_; }
  const Surd& value() const { return value_; }

 private:
  Kind kind_ = Kind::Rational;
  std::string literal_;
  Surd value_;
};

class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::vector<RealExpr> coords);
  // Comma-separated coordinates, optionally wrapped in parentheses.
  static RealVector parse(std::string_view literal);

  std::size_t dim() const { return coords_.size(); }
  const RealExpr& operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<RealExpr>& coords() const { return coords_; }
  std::string literal() const;
  RealVector append(const RealExpr& y) const;
  bool all_rational() const;

 private:
  std::vector<RealExpr> coords_;
};

CertifiedValue nearest_int_dist(const RealExpr& t, unsigned bits);
CertifiedValue nearest_int_dist(const Surd& t, unsigned bits);
CertifiedValue sup_norm_dist(const RealVector& v, std::uint64_t q, unsigned bits);

// Exact ‖q·v + γ‖ (sup norm) as a surd; gamma may be empty.
Surd sup_norm_dist_exact(const RealVector& v, const mpz_class& q, const RealVector* gamma = nullptr,
                         const PrecisionPolicy& policy = {});

}  // namespace dioph
