#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "dioph/real.hpp"
#include "dioph/real_value.hpp"

namespace dioph {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr u128 kHalf = static_cast<u128>(1) << 127;

// Reduction of v modulo 2^128 into an unsigned word.
u128 to_u128_mod(const mpz_class& v);
mpz_class from_u128(u128 v);

// Distance to the nearest multiple of 2^128, i.e. ‖u/2^128‖·2^128.
inline u128 circ_dist(u128 u) { return u > kHalf ? static_cast<u128>(0) - u : u; }

// frac(x)·2^128 ∈ [value, value + width] modulo 2^128.
struct FixedFrac {
  u128 value = 0;
  u128 width = 0;
};
FixedFrac fixed_frac(const Surd& x);

// t·2^128 ∈ [lo, hi] with both clamped to 2^127 + 1.
struct FixedThreshold {
  u128 lo = 0;
  u128 hi = 0;
  bool above_half = false;  // t > 1/2 certified: every distance qualifies
  bool nonpositive = false;  // t <= 0 certified: no distance qualifies
};
FixedThreshold fixed_threshold(const Real& t);

enum class Tri { No, Yes, Unknown };

// Decides u < t where the true scaled distance lies in [g - err, g + err].
inline Tri fixed_less(u128 g, u128 err, const FixedThreshold& t) {
  if (t.above_half) return Tri::Yes;
  if (t.nonpositive) return Tri::No;
  if (g + err < t.lo) return Tri::Yes;
  if (g >= err && g - err >= t.hi) return Tri::No;
  return Tri::Unknown;
}

// Precomputed point x (and optional shift γ) answering ‖q·x + γ‖ < t queries:
// a 128-bit fixed-point test first, exact surd arithmetic when it is inconclusive.
class ScaledPoint {
 public:
  explicit ScaledPoint(const RealVector& x, const RealVector* gamma = nullptr,
                       PrecisionPolicy policy = {});

  std::size_t dim() const { return x_.dim(); }
  const RealVector& point() const { return x_; }
  const FixedFrac& coord(std::size_t i) const { return frac_[i]; }

  bool dist_less(std::uint64_t q, const FixedThreshold& ft, const Real& t) const;
  // Scalar test for one coordinate.
  bool coord_dist_less(std::size_t i, std::uint64_t q, const FixedThreshold& ft, const Real& t) const;
  Surd dist_exact(std::uint64_t q) const;

 private:
  RealVector x_;
  bool shifted_ = false;
  RealVector gamma_;
  std::vector<FixedFrac> frac_;
  std::vector<FixedFrac> shift_;
  PrecisionPolicy policy_;
};

}  // namespace dioph
