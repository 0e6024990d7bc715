#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dioph/counting.hpp"
#include "dioph/real.hpp"

namespace dioph {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ExponentKind { TauD, OmegaD, OmegaS };
const char* exponent_kind_name(ExponentKind k);

// Which dyadic blocks enter the aggregated estimate.
struct Aggregation {
  enum class Mode { TopFraction, FromBlock };
  Mode mode = Mode::TopFraction;
  double fraction = 0.5;  // blocks b > floor(B·(1 − fraction))
  unsigned from_block = 1;
};

struct BlockMax {
  unsigned b = 0;
  std::uint64_t lo = 0, hi = 0;  // height range (lo, hi]
  bool populated = false;
  double value = 0;               // may be +infinity
  std::vector<std::int64_t> witness;  // n-vector, or {q} for simultaneous kinds
};

struct ExponentEstimate {
  ExponentKind kind = ExponentKind::TauD;
  double value = 0;  // lower-bound estimate, may be +infinity
  std::uint64_t height = 0;           // requested H or Q_max
  std::uint64_t effective_height = 0; // after budget degradation
  unsigned dim = 0;
  std::vector<BlockMax> blocks;
  unsigned window_from = 1;
  std::vector<std::pair<std::vector<std::int64_t>, double>> best_witnesses;
  bool exact_resonance = false;
  bool boundary_regime = false;
  bool still_increasing = false;  // window maximum attained in the last two populated blocks
  std::vector<std::string> warnings;
};

// τ_D: max over window blocks of −log‖⟨n,x⟩‖ / log|n|_∞, 2 <= |n|_∞ <= H.
ExponentEstimate estimate_tau_D(const RealVector& x, std::uint64_t H, const Aggregation& agg = {},
                                const Budget& budget = {});
// ω_D = τ_D − dim(x) on the same witnesses, aggregated value clamped at 0.
ExponentEstimate estimate_omega_D(const RealVector& x, std::uint64_t H, const Aggregation& agg = {},
                                  const Budget& budget = {});
ExponentEstimate omega_D_from_tau(const ExponentEstimate& tau, const Aggregation& agg = {});
// ω_S: d·(−log‖q·x‖ / log q) − 1 over 2 <= q <= Q_max, aggregated value clamped at 0.
ExponentEstimate estimate_omega_S(const RealVector& x_full, std::uint64_t Q_max, const Aggregation& agg = {},
                                  const Budget& budget = {});

struct TransferenceCheck {
  bool pass = false;
  double lower = 0;  // ω_D/(d² + (d−1)ω_D), 1/(d−1) for ω_D = ∞
  double upper = 0;  // ω_D, +infinity when vacuous
  std::string detail;
};

TransferenceCheck check_transference(double omega_D, double omega_S, unsigned d, double slack);

// q <= Q_max with ‖q·x‖ < q^(−1/d − ε), increasing.
std::vector<std::uint64_t> vwa_witnesses(const RealVector& x_full, const mpq_class& epsilon, std::uint64_t Q_max,
                                         const Budget& budget = {});

struct ExtensionCheck {
  bool holds = true;  // every block maximum of (x, y) >= that of x
  ExponentEstimate base, extended;
};

ExtensionCheck extension_monotonicity(const RealVector& x, const RealExpr& y, std::uint64_t H,
                                      const Aggregation& agg = {}, const Budget& budget = {});

}  // namespace dioph
