#include "dioph/fixed.hpp"

namespace dioph {

u128 to_u128_mod(const mpz_class& v) {
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), 128);
  mpz_class hi_part;
  mpz_fdiv_q_2exp(hi_part.get_mpz_t(), r.get_mpz_t(), 64);
  mpz_class lo_part;
  mpz_fdiv_r_2exp(lo_part.get_mpz_t(), r.get_mpz_t(), 64);
  const std::uint64_t lo = mpz_get_ui(lo_part.get_mpz_t());
  const std::uint64_t hi = mpz_get_ui(hi_part.get_mpz_t());
  return (static_cast<u128>(hi) << 64) | lo;
}

mpz_class from_u128(u128 v) {
  mpz_class hi = static_cast<unsigned long>(v >> 64);
  mpz_class out;
  mpz_mul_2exp(out.get_mpz_t(), hi.get_mpz_t(), 64);
  out += static_cast<unsigned long>(v);
  return out;
}

FixedFrac fixed_frac(const Surd& x) {
  mpz_class lo, hi;
  x.scaled_bounds(130, lo, hi);
  mpz_class flo, chi;
  mpz_fdiv_q_2exp(flo.get_mpz_t(), lo.get_mpz_t(), 2);
  mpz_cdiv_q_2exp(chi.get_mpz_t(), hi.get_mpz_t(), 2);
  FixedFrac f;
  f.value = to_u128_mod(flo);
  mpz_class w = chi - flo;
  f.width = static_cast<u128>(mpz_get_ui(w.get_mpz_t()));
  return f;
}

FixedThreshold fixed_threshold(const Real& t) {
  mpz_class lo, hi;
  scaled_bounds(t, 128, lo, hi);
  FixedThreshold ft;
  mpz_class half = from_u128(kHalf);
  if (lo > half) {
    ft.above_half = true;
    return ft;
  }
  if (hi <= 0) {
    ft.nonpositive = true;
    return ft;
  }
  mpz_class cap = half + 1;
  if (lo < 0) lo = 0;
  if (hi > cap) hi = cap;
  ft.lo = to_u128_mod(lo);
  ft.hi = to_u128_mod(hi);
  return ft;
}

ScaledPoint::ScaledPoint(const RealVector& x, const RealVector* gamma, PrecisionPolicy policy)
    : x_(x), policy_(policy) {
  for (const auto& c : x.coords()) frac_.push_back(fixed_frac(c.value()));
  if (gamma) {
    if (gamma->dim() != x.dim()) fail(ErrorKind::InvalidInput, "shift dimension differs from point dimension");
    shifted_ = true;
    gamma_ = *gamma;
    for (const auto& c : gamma->coords()) shift_.push_back(fixed_frac(c.value()));
  }
}

bool ScaledPoint::coord_dist_less(std::size_t i, std::uint64_t q, const FixedThreshold& ft, const Real& t) const {
  const FixedFrac& f = frac_[i];
  u128 v = static_cast<u128>(q) * f.value;
  u128 err = static_cast<u128>(q) * f.width;
  if (shifted_) {
    v += shift_[i].value;
    err += shift_[i].width;
  }
  // v is the lower end of the enclosure; the midpoint error is bounded by err
  Tri r = fixed_less(circ_dist(v), err, ft);
  if (r == Tri::Yes) return true;
  if (r == Tri::No) return false;
  Surd z = x_[i].value() * mpq_class(mpz_class(static_cast<unsigned long>(q)));
  if (shifted_) z += gamma_[i].value();
  return less_than(nearest_int_distance(z, policy_), t, policy_);
}

bool ScaledPoint::dist_less(std::uint64_t q, const FixedThreshold& ft, const Real& t) const {
  if (ft.above_half) return true;
  if (ft.nonpositive) return false;
  for (std::size_t i = 0; i < frac_.size(); ++i)
    if (!coord_dist_less(i, q, ft, t)) return false;
  return true;
}

Surd ScaledPoint::dist_exact(std::uint64_t q) const {
  return sup_norm_dist_exact(x_, mpz_class(static_cast<unsigned long>(q)), shifted_ ? &gamma_ : nullptr, policy_);
}

}  // namespace dioph
