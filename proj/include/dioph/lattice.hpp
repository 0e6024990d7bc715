#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dioph/counting.hpp"
#include "dioph/real.hpp"
#include "dioph/real_value.hpp"

namespace dioph {

// Λ = g_t·u_x·ℤ^(ℓ+1) with R = e^(t/ℓ)·δ = e^(−t)·N.
struct LatticeSpec {
  RealVector x;
  std::uint64_t N = 1;
  mpq_class delta;
  CertifiedValue t;        // log(N/δ)/(1 + 1/ℓ)
  CertifiedValue R_scale;  // e^(t/ℓ)·δ
  CertifiedValue R_decay;  // e^(−t)·N
  CertifiedValue R;        // intersection of both routes
  CertifiedValue det;      // det(g_t·u_x), encloses 1
  unsigned bits = 0;

  std::size_t dim() const { return x.dim(); }
};

LatticeSpec build_lattice(const RealVector& x, std::uint64_t N, const mpq_class& delta, unsigned bits = 128);

// |{r ∈ Λ : |r|_∞ < R}| = Σ_{|q| < N} Π_i |{m : |m − q·x_i| < δ}|.
std::uint64_t count_lattice_points(const LatticeSpec& spec, const Budget& budget = {});

// Dual lattice vector s = g_t'·u_x'·(q, p) = (e^(−t/ℓ)·q, e^t·(⟨q,x⟩ + p)).
struct DualVector {
  std::vector<std::int64_t> q;
  std::int64_t p = 0;
  CertifiedValue residual;  // |⟨q,x⟩ + p|
  CertifiedValue sup_norm_image;
};

inline constexpr double kDefaultSearchBound = 8.0;

// First nonzero (q, p), by increasing |q|_∞, with |q|_∞ <= search_bound/δ and |⟨q,x⟩ + p| <= search_bound/N.
std::optional<DualVector> dual_short_vector(const LatticeSpec& spec, double search_bound = kDefaultSearchBound,
                                            const Budget& budget = {});
// Same search with explicit ranges, no lattice spec needed.
std::optional<DualVector> dual_search(const RealVector& x, std::uint64_t q_bound, const mpq_class& residual_bound,
                                      const Budget& budget = {});

enum class NalphaVerdict { Pass, Fail, Inconclusive };
const char* nalpha_verdict_name(NalphaVerdict v);

struct NalphaOptions {
  std::uint64_t N_min = 1000;
  double search_bound = kDefaultSearchBound;
  bool probe = true;  // run the dual search when the bound fails at N >= N_min
};

struct NalphaCheck {
  NalphaVerdict verdict = NalphaVerdict::Inconclusive;
  std::uint64_t count = 0;
  Real bound;  // 4^(ℓ+1)·N·δ^ℓ
  CertifiedValue bound_enclosure;
  CertifiedValue margin;  // bound − count
  std::string reason;
  std::optional<DualVector> witness;
  // witness satisfies |⟨q,x⟩ + p| <= search_bound^(1+τ)·|q|_∞^(−τ)
  bool witness_final_holds = false;
};

// |{q <= N : ‖q·x‖ < δ}| <= 4^(ℓ+1)·N·δ^ℓ for δ >= N^(−1/τ).
NalphaCheck verify_nalpha_bound(const RealVector& x, const mpq_class& tau, std::uint64_t N, const Real& delta,
                                const NalphaOptions& options = {}, const Budget& budget = {});

}  // namespace dioph
