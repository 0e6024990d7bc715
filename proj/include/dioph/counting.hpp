#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/fixed.hpp"
#include "dioph/real.hpp"
#include "dioph/real_value.hpp"

namespace dioph {

struct Budget {
  std::uint64_t max_scan_steps = 100000000ULL;
  std::uint64_t max_cells = 100000000ULL;  // enumeration cells (vectors, balls)
};

inline constexpr std::uint64_t kCountBlock = 1ULL << 16;

struct CountQuery {
  RealVector x;
  std::optional<Real> delta;            // fixed threshold δ
  std::optional<ApproxFunction> psi;    // threshold ψ(N) when delta is absent
  std::uint64_t M = 0;
  std::uint64_t N = 1;
  std::optional<RealVector> gamma;
  bool keep_witnesses = false;
  std::size_t witness_cap = 10000;
  unsigned threads = 1;
};

struct CountReport {
  std::uint64_t M = 0, N = 0;
  std::uint64_t count = 0;
  Real threshold;
  CertifiedValue threshold_enclosure;
  // N·δ^ℓ − 1, only meaningful for M = 0
  bool bound_applicable = false;
  CertifiedValue lemma_lower_bound;
  bool bound_satisfied = false;
  std::vector<std::uint64_t> witnesses;
  bool witnesses_truncated = false;
};

CountReport count_Q(const CountQuery& query, const Budget& budget = {});

// |{M < q <= N : ‖q·x + γ‖ < t}| over a precomputed point.
std::uint64_t count_range(const ScaledPoint& sp, const Real& t, std::uint64_t M, std::uint64_t N,
                          unsigned threads = 1, std::vector<std::uint64_t>* witnesses = nullptr,
                          std::size_t witness_cap = 0);

struct LowerBoundCheck {
  bool pass = false;
  std::uint64_t count = 0;
  CertifiedValue bound;   // N·δ^ℓ − 1
  CertifiedValue margin;  // count − bound
};

LowerBoundCheck verify_count_lower_bound(const RealVector& x, const mpq_class& delta, std::uint64_t N,
                                         const Budget& budget = {});

// Q over (k^{j−1}, k^j] at threshold ψ(k^j), j = 1..j_max.
std::vector<CountReport> block_counts(const RealVector& x, const ApproxFunction& psi, unsigned k, unsigned j_max,
                                      const Budget& budget = {});

// q in [lo, hi] with ‖q·x‖ < ψ(q), increasing.
std::vector<std::uint64_t> qualifying_q(const ScaledPoint& sp, const ApproxFunction& psi, std::uint64_t lo,
                                        std::uint64_t hi, const Budget& budget = {});

struct SeriesPoint {
  std::uint64_t Q = 0;
  std::uint64_t qualifying = 0;
  CertifiedValue sum;
};

// Σ ψ(q)^k_exp over q <= Q_max with ‖q·x‖ < ψ(q), at Q = 1, 2, 4, ... and Q_max.
std::vector<SeriesPoint> partial_series(const RealVector& x, const ApproxFunction& psi, unsigned k_exp,
                                        std::uint64_t Q_max, const Budget& budget = {});

struct NalphaRow {
  unsigned j = 0;
  std::uint64_t count = 0;
  CertifiedValue bound;  // C·k^{j+shift}·ψ(k^j)^{d−1}
  bool pass = false;
};

struct NalphaReport {
  std::vector<NalphaRow> rows;
  std::optional<unsigned> j0;  // least j from which every tested row passes
  bool expected_failure = false;  // point with an exact resonance
};

NalphaReport verify_cor_nalpha(const RealVector& x, const ApproxFunction& psi, unsigned k, int ell_shift,
                               unsigned j_lo, unsigned j_hi, std::optional<mpq_class> C = std::nullopt,
                               const Budget& budget = {});

// True when some nonzero integer vector n has ⟨n, x⟩ ∈ Z.
bool has_exact_resonance(const RealVector& x);

std::uint64_t to_u64(const mpz_class& v);

}  // namespace dioph
