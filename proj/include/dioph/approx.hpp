#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dioph/real.hpp"
#include "dioph/real_value.hpp"

namespace dioph {

// Nonincreasing ψ: N -> [0, ∞) given as a symbolic preset.
class ApproxFunction {
 public:
  enum class Kind { Power, PowerLog, Constant, Phi, Max, Table };
  using Table = std::vector<std::pair<std::uint64_t, mpq_class>>;

  // q^-a
  static ApproxFunction power(const mpq_class& a);
  // q^-a·(log q)^-b, q >= 2
  static ApproxFunction power_log(const mpq_class& a, const mpq_class& b);
  static ApproxFunction constant(const mpq_class& c);
  // (q·(log q)^2)^(-1/d), with φ(1) = φ(2)
  static ApproxFunction phi(unsigned d);
  static ApproxFunction pointwise_max(const ApproxFunction& f, const ApproxFunction& g);
  // Value at the largest key <= q, the first value below the first key, 0 past the last key.
  static ApproxFunction table(Table entries);
  // As table() without the monotonicity audit.
  static ApproxFunction unchecked_table(Table entries);

  // "q^-0.5", "q^-0.5*log^-1", "const:0.3", "phi:d=2", "max(A,B)", "table:<path>"
  static ApproxFunction parse(std::string_view literal);

  Kind kind() const { return kind_; }
  const std::string& literal() const { return literal_; }
  const mpq_class& exponent() const { return a_; }
  const mpq_class& log_exponent() const { return b_; }
  unsigned phi_dim() const { return d_; }
  bool is_zero() const { return kind_ == Kind::Constant && a_ == 0; }

  Real value(const mpz_class& q) const;
  Real value(std::uint64_t q) const { return value(mpz_class(static_cast<unsigned long>(q))); }
  double approx(std::uint64_t q) const;

 private:
  Kind kind_ = Kind::Constant;
  std::string literal_;
  mpq_class a_, b_;
  unsigned d_ = 0;
  std::shared_ptr<const Table> table_;
  std::shared_ptr<const ApproxFunction> f_, g_;
};

CertifiedValue certify(const Real& v, unsigned bits);

CertifiedValue eval_psi(const ApproxFunction& psi, std::uint64_t q, unsigned bits = 128);

// ψ(q) if ‖q·x‖ < ψ(q), else 0.
CertifiedValue psi_x(const ApproxFunction& psi, const RealVector& x, std::uint64_t q, unsigned bits = 128);

struct DivergenceRule {
  unsigned window = 5;
  double increment_floor = 1e-6;
  double ratio_max = 0.9;
  double decay_converges = 1.25;  // polynomial decay exponent of the terms
  double decay_diverges = 1.0;
};

struct DivergenceVerdict {
  enum class Verdict { Diverges, Converges, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::pair<unsigned, CertifiedValue>> partial_sums;  // (M, Σ_{1<=m<=M} 2^m ψ(2^m)^d)
  double growth_slope = 0;   // mean increment over the window
  double decay_exponent = 0; // -Δlog t / Δlog m over the window
  std::string reason;
};

const char* verdict_name(DivergenceVerdict::Verdict v);

// Condensed terms t_m = k^m·ψ(k^m)^d, m = 1..M, summed exactly when every term is rational.
std::vector<std::pair<unsigned, CertifiedValue>> condensed_partial_sums(const ApproxFunction& psi, unsigned d,
                                                                        unsigned k, unsigned M);
DivergenceVerdict classify_terms(const std::vector<std::pair<unsigned, CertifiedValue>>& partial_sums,
                                 const std::vector<CertifiedValue>& terms, const DivergenceRule& rule = {});
DivergenceVerdict classify_divergence(const ApproxFunction& psi, unsigned d, unsigned M_max,
                                      const DivergenceRule& rule = {});

struct RegularityResult {
  bool holds = true;
  Real witnessed_kappa;  // max of Ψ(k^{j+1})/Ψ(k^j) over the range
  bool kappa_defined = false;
  std::vector<std::pair<unsigned, Real>> ratios;
};

// Ψ(q) = ψ(q)/q; verifies Ψ(k^{j+1}) <= Ψ(k^j)/k for j in [j_lo, j_hi].
RegularityResult check_u_regular(const ApproxFunction& psi, unsigned k, unsigned j_lo, unsigned j_hi);

mpz_class ipow(unsigned long k, unsigned long j);

}  // namespace dioph
