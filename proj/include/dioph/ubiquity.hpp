#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/counting.hpp"
#include "dioph/fixed.hpp"
#include "dioph/real.hpp"

namespace dioph {

// Endpoints in 64.64 fixed point: value·2^64, with 1 = kUnit.
inline constexpr u128 kUnit = static_cast<u128>(1) << 64;

struct FixedInterval {
  u128 lo = 0, hi = 0;
};

enum class Rounding { Inner, Outer };

// Sorted, disjoint, closed intervals inside [0, 1].
class IntervalUnion {
 public:
  IntervalUnion() = default;
  // Clips to [0, 1], sorts and merges overlapping or touching intervals.
  static IntervalUnion from_fixed(std::vector<FixedInterval> intervals);
  // Rational endpoints rounded inward or outward to the 2^-64 grid.
  static IntervalUnion from_rational(const std::vector<std::pair<mpq_class, mpq_class>>& intervals, Rounding r);

  const std::vector<FixedInterval>& intervals() const { return iv_; }
  bool empty() const { return iv_.empty(); }
  u128 measure_units() const;
  mpq_class measure() const;
  // other ⊆ this
  bool contains(const IntervalUnion& other) const;
  IntervalUnion unite(const IntervalUnion& other) const;

 private:
  std::vector<FixedInterval> iv_;
};

mpq_class units_to_rational(u128 units);

// Inner and outer roundings of one ball family; the true measure lies between.
struct BallUnion {
  IntervalUnion inner, outer;
  std::uint64_t balls = 0;
  CertifiedValue measure;
};

using RadiusRule = std::function<CertifiedValue(std::uint64_t q)>;

struct Center {
  std::uint64_t p = 0, q = 1;
};

BallUnion union_of_balls(const std::vector<Center>& centers, const RadiusRule& radius);

// The family ⋃_{q ∈ qs} ⋃_{p=0}^{q} B(p/q, a/q) ∩ [0, 1] where `a` is a certified enclosure of a
// per-q threshold (the ball radius is a/q) or, with uniform_radius, of the radius itself.
struct BallFamily {
  std::vector<std::uint64_t> qs;
  CertifiedValue a;
  bool uniform_radius = false;

  std::uint64_t ball_count() const;
};

// Streamed union measure, inner and outer; never materialises the intervals.
CertifiedValue family_measure(const BallFamily& family, const Budget& budget = {});
BallUnion family_union(const BallFamily& family, const Budget& budget = {});

// Certified lower bound for the uniform-radius family measure by the second Bonferroni
// inequality over a greedily chosen subfamily. Exact pair intersections, no enumeration of balls.
struct PairwiseBound {
  mpq_class lower;          // certified
  std::size_t used = 0;     // subfamily size
  std::uint64_t pairs = 0;
};
PairwiseBound pairwise_lower_bound(const std::vector<std::uint64_t>& qs, const mpq_class& radius,
                                   std::size_t max_family = 4000);

// ⋃_{q <= N, ‖q·x‖ < ψ(N)} ⋃_{p=0}^{q} B(p/q, 2/(q·N·ψ(N)^(d−1))), d = dim(x) + 1.
struct CoverReport {
  std::uint64_t N = 0;
  unsigned d = 0;
  CertifiedValue psi_N;
  std::uint64_t qualifying = 0;
  std::uint64_t balls = 0;
  CertifiedValue measure;
};

bool nreq_holds(const ApproxFunction& psi, unsigned d, std::uint64_t N);
CoverReport mink_cover(const RealVector& x, const ApproxFunction& psi, std::uint64_t N, const Budget& budget = {});
BallUnion mink_cover_union(const RealVector& x, const ApproxFunction& psi, std::uint64_t N, const Budget& budget = {});

enum class ConditionState { HoldsFrom, Fails, Inconclusive };
const char* condition_state_name(ConditionState s);

struct ConditionVerdict {
  ConditionState state = ConditionState::Inconclusive;
  unsigned j0 = 0;
  std::string note;
};

enum class MeasureMethod { Exact, Pairwise, None };
const char* measure_method_name(MeasureMethod m);

struct UbiquityRow {
  unsigned j = 0;
  std::uint64_t block_count = 0;  // k^{j−1} < q <= k^j with ‖q·x‖ < ψ(k^j)
  std::uint64_t small_count = 0;  // q <= k^{j−1} with ‖q·x‖ < ψ(k^j)
  bool nreq = false;              // (Nreq) at N = k^j
  MeasureMethod method = MeasureMethod::None;
  CertifiedValue u_measure;       // (U) union measure: exact enclosure, or [lower, 1] for pairwise
  CertifiedValue small_mass;      // enclosure of the small-q mass (radius 2/(q·k^j·ψ^(d−1)))
  bool small_mass_exact = false;  // false: union bound only
  mpq_class u_lower;              // best certified lower bound for the (U) measure
  double r_ratio = 0;             // Ψ(k^{j+1})/Ψ(k^j)
  CertifiedValue d_partial;       // Σ_{i<=j} k^i·ψ(k^i)^d
  CertifiedValue d_normalized;    // the same divided by c
};

struct UbiquityOptions {
  double kappa_floor = 0.05;
  std::size_t pairwise_family = 4000;
};

struct UbiquityReport {
  unsigned k = 2;
  mpq_class c;
  unsigned d = 2;
  unsigned j_lo = 1, j_hi = 1;
  unsigned j_hi_requested = 1;  // j_hi before budget truncation
  double kappa_floor = 0.05;
  std::vector<UbiquityRow> rows;
  double kappa_witness = 0;  // min of u_lower over j >= j0 of the U verdict
  ConditionVerdict U, R, D;
  // small-q mass <= 1 − kappa floor for every tested j >= j0 (the displacement argument alone)
  ConditionVerdict displacement;
  std::vector<std::string> warnings;
};

UbiquityReport check_conditions(const RealVector& x, const ApproxFunction& psi, unsigned d, unsigned k,
                                const mpq_class& c, unsigned j_lo, unsigned j_hi, const UbiquityOptions& options = {},
                                const Budget& budget = {});

struct SelectKResult {
  std::optional<unsigned> k;
  std::vector<UbiquityReport> tried;  // one per k in the search order
};

// Smallest k in k_values, with c = 2k, whose certified (U) lower bound reaches the kappa floor for every
// tested j >= some j0. The lower bound per j is the better of the direct (U) union measure and the
// displacement bound 1 − small-q mass.
SelectKResult select_k(const RealVector& x, const ApproxFunction& psi, unsigned d, const std::vector<unsigned>& k_values,
                       unsigned j_lo, unsigned j_hi, const UbiquityOptions& options = {}, const Budget& budget = {});

// Mink block part (k^{j−1} < q <= k^j, mink radii, outer rounding) inside the (U) union
// (radius c/(k^{2j}·ψ(k^j)^(d−1)), inner rounding).
bool block_inside_u_union(const RealVector& x, const ApproxFunction& psi, unsigned d, unsigned k, unsigned j,
                          const mpq_class& c, const Budget& budget = {});

}  // namespace dioph
