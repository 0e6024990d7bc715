#include "dioph/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace dioph {

const char* nalpha_verdict_name(NalphaVerdict v) {
  switch (v) {
    case NalphaVerdict::Pass: return "pass";
    case NalphaVerdict::Fail: return "fail";
    case NalphaVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

constexpr u128 kMax = ~static_cast<u128>(0);

CertifiedValue to_certified(const Interval& iv, unsigned bits) {
  CertifiedValue c;
  c.lower = iv.lower().to_rational();
  c.upper = iv.upper().to_rational();
  const double w = mpq_class(c.upper - c.lower).get_d();
  c.precision_bits = w <= 0 ? bits : static_cast<unsigned>(std::max(0.0, std::floor(-std::log2(w))));
  return c;
}

Interval hull(const CertifiedValue& c, mpfr_prec_t prec) { return Interval::hull(c.lower, c.upper, prec); }

// floor and ceil of v·2^128 for 0 < v < 1; `ok` is false when the ceiling does not fit.
struct Scaled {
  u128 lo = 0, hi = 0;
  bool ok = false;
};

Scaled scale128(const mpq_class& v) {
  Scaled s;
  mpz_class num = v.get_num();
  mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), 128);
  mpz_class f, c;
  mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), v.get_den_mpz_t());
  mpz_cdiv_q(c.get_mpz_t(), num.get_mpz_t(), v.get_den_mpz_t());
  if (f < 0 || mpz_sizeinbase(c.get_mpz_t(), 2) > 128) return s;
  s.lo = to_u128_mod(f);
  s.hi = to_u128_mod(c);
  s.ok = true;
  return s;
}

// [frac(q·x_i) < δ] + [1 − frac(q·x_i) < δ] for 0 < δ < 1.
int coord_count(const Surd& xi, const FixedFrac& F, std::uint64_t q, const Scaled& D, const mpq_class& delta) {
  const u128 v = static_cast<u128>(q) * F.value;
  const u128 e = static_cast<u128>(q) * F.width + 1;
  int below = -1, above = -1;  // decided halves, −1 when undecided
  if (D.ok && v <= kMax - e) {
    // frac·2^128 ∈ [v, v + e]
    if (v + e < D.lo) below = 1;
    else if (v >= D.hi) below = 0;
    if (v >= 1) {
      // (1 − frac)·2^128 ∈ [L, L + e]
      const u128 L = static_cast<u128>(0) - (v + e);
      if (L + e < D.lo) above = 1;
      else if (L >= D.hi) above = 0;
    }
  }
  if (below < 0 || above < 0) {
    Surd s = xi * mpq_class(static_cast<unsigned long>(q));
    Surd f = s - Surd(mpq_class(s.floor()));
    if (below < 0) below = compare(f, Surd(delta)) < 0;
    if (above < 0) above = compare(Surd(1) - f, Surd(delta)) < 0;
  }
  return below + above;
}

bool canonical(const std::vector<std::int64_t>& q) {
  for (auto v : q)
    if (v != 0) return v > 0;
  return false;
}

// Visits every canonical q with |q|_∞ = m; stops when f returns true.
template <class F>
bool for_shell(std::size_t ell, std::int64_t m, F&& f) {
  std::vector<std::int64_t> q(ell);
  for (std::size_t i = 0; i < ell; ++i) {
    for (std::int64_t s : {m, -m}) {
      auto lo = [&](std::size_t j) { return j < i ? -(m - 1) : -m; };
      auto hi = [&](std::size_t j) { return j < i ? m - 1 : m; };
      for (std::size_t j = 0; j < ell; ++j) q[j] = j == i ? s : lo(j);
      for (;;) {
        if (canonical(q) && f(q)) return true;
        std::size_t j = 0;
        for (; j < ell; ++j) {
          if (j == i) continue;
          if (q[j] < hi(j)) {
            ++q[j];
            break;
          }
          q[j] = lo(j);
        }
        if (j == ell) break;
      }
    }
  }
  return false;
}

Surd inner(const RealVector& x, const std::vector<std::int64_t>& q) {
  Surd s;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] != 0) s += x[i].value() * mpq_class(static_cast<long>(q[i]));
  return s;
}

mpq_class exact_rational(double v) {
  mpq_class r(v);
  r.canonicalize();
  return r;
}

}  // namespace

LatticeSpec build_lattice(const RealVector& x, std::uint64_t N, const mpq_class& delta, unsigned bits) {
  if (x.dim() == 0) fail(ErrorKind::InvalidInput, "lattice needs a point of dimension at least 1");
  if (N < 1) fail(ErrorKind::InvalidInput, "N must be at least 1");
  if (delta <= 0 || delta >= 1) fail(ErrorKind::InvalidInput, "lattice requires 0 < delta < 1");
  LatticeSpec spec;
  spec.x = x;
  spec.N = N;
  spec.delta = delta;
  spec.bits = bits;
  const long ell = static_cast<long>(x.dim());
  const mpfr_prec_t prec = bits + 64;
  const Interval n = Interval::point(mpq_class(static_cast<unsigned long>(N)), prec);
  const Interval d = Interval::point(delta, prec);
  const Interval t = log(n / d) * Interval::point(mpq_class(ell, ell + 1), prec);
  const Interval grow = exp(t / Interval::point(ell, prec));
  const Interval r_scale = grow * d;
  const Interval r_decay = exp(-t) * n;
  if (!r_scale.overlaps(r_decay))
    fail(ErrorKind::PrecisionExhausted, "the two radius evaluations do not overlap");
  const Interval det = pow_si(grow, ell) * exp(-t);
  if (!det.contains(1)) fail(ErrorKind::PrecisionExhausted, "determinant enclosure excludes 1");
  spec.t = to_certified(t, bits);
  spec.R_scale = to_certified(r_scale, bits);
  spec.R_decay = to_certified(r_decay, bits);
  spec.R.lower = std::max(spec.R_scale.lower, spec.R_decay.lower);
  spec.R.upper = std::min(spec.R_scale.upper, spec.R_decay.upper);
  spec.R.precision_bits = std::max(spec.R_scale.precision_bits, spec.R_decay.precision_bits);
  spec.det = to_certified(det, bits);
  return spec;
}

std::uint64_t count_lattice_points(const LatticeSpec& spec, const Budget& budget) {
  if (spec.delta <= 0 || spec.delta >= 1 || spec.N < 1) fail(ErrorKind::InvalidInput, "invalid lattice spec");
  if (spec.N - 1 > budget.max_scan_steps) fail(ErrorKind::BudgetExceeded, "N exceeds the scan budget");
  const std::size_t ell = spec.dim();
  std::vector<FixedFrac> F;
  for (const auto& c : spec.x.coords()) F.push_back(fixed_frac(c.value()));
  const Scaled D = scale128(spec.delta);
  // q = 0 contributes the origin only; ±q contribute equally
  std::uint64_t half = 0;
  for (std::uint64_t q = 1; q < spec.N; ++q) {
    std::uint64_t prod = 1;
    for (std::size_t i = 0; i < ell && prod != 0; ++i)
      prod *= static_cast<std::uint64_t>(coord_count(spec.x[i].value(), F[i], q, D, spec.delta));
    half += prod;
  }
  return 2 * half + 1;
}

std::optional<DualVector> dual_search(const RealVector& x, std::uint64_t q_bound, const mpq_class& residual_bound,
                                      const Budget& budget) {
  if (residual_bound < 0) fail(ErrorKind::InvalidInput, "residual bound must be nonnegative");
  const std::size_t ell = x.dim();
  const double cells = std::pow(2.0 * static_cast<double>(q_bound) + 1, static_cast<double>(ell));
  if (cells > static_cast<double>(budget.max_cells))
    fail(ErrorKind::BudgetExceeded, "dual search range of " + std::to_string(q_bound) + " exceeds the cell budget");
  if (q_bound > (1ULL << 40)) fail(ErrorKind::BudgetExceeded, "dual search range too large");
  const Surd B(residual_bound);
  if (residual_bound >= 1) {
    DualVector v;
    v.q.assign(ell, 0);
    v.p = 1;
    v.residual = certify(Surd(1), 64);
    return v;
  }
  std::vector<FixedFrac> F;
  u128 wsum = 0;
  for (const auto& c : x.coords()) {
    F.push_back(fixed_frac(c.value()));
    wsum += F.back().width;
  }
  const bool all_pass = residual_bound >= mpq_class(1, 2);
  const Scaled T = scale128(residual_bound == 0 ? mpq_class(1, 2) : residual_bound);
  std::optional<DualVector> found;
  for (std::uint64_t m = 1; m <= q_bound && !found; ++m) {
    const u128 err = static_cast<u128>(m) * wsum + ell + 1;
    for_shell(ell, static_cast<std::int64_t>(m), [&](const std::vector<std::int64_t>& q) {
      if (!all_pass && residual_bound > 0 && T.ok) {
        u128 u = 0;
        for (std::size_t i = 0; i < ell; ++i) u += static_cast<u128>(static_cast<i128>(q[i])) * F[i].value;
        const u128 g = circ_dist(u);
        if (g > err && g - err > T.hi) return false;
      }
      const Surd z = inner(x, q);
      const Surd r = nearest_int_distance(z);
      if (compare(r, B) > 0) return false;
      DualVector v;
      v.q = q;
      const mpz_class nearest = (z + Surd(mpq_class(1, 2))).floor();
      v.p = -nearest.get_si();
      v.residual = certify(r, 128);
      found = std::move(v);
      return true;
    });
  }
  return found;
}

std::optional<DualVector> dual_short_vector(const LatticeSpec& spec, double search_bound, const Budget& budget) {
  if (!(search_bound > 0)) fail(ErrorKind::InvalidInput, "search_bound must be positive");
  const mpq_class sb = exact_rational(search_bound);
  const mpq_class qb = sb / spec.delta;
  const mpz_class q_bound = qb.get_num() / qb.get_den();
  if (mpz_sizeinbase(q_bound.get_mpz_t(), 2) > 62) fail(ErrorKind::BudgetExceeded, "dual search range too large");
  auto v = dual_search(spec.x, q_bound.get_ui(), sb / mpq_class(static_cast<unsigned long>(spec.N)), budget);
  if (!v) return v;
  const mpfr_prec_t prec = spec.bits + 64;
  const Interval t = hull(spec.t, prec);
  const long ell = static_cast<long>(spec.dim());
  std::int64_t qn = 0;
  for (auto c : v->q) qn = std::max<std::int64_t>(qn, std::llabs(c));
  const Interval a = exp(-(t / Interval::point(ell, prec))) * Interval::point(static_cast<long>(qn), prec);
  const Interval b = exp(t) * hull(v->residual, prec);
  v->sup_norm_image = to_certified(max(a, b), spec.bits);
  return v;
}

NalphaCheck verify_nalpha_bound(const RealVector& x, const mpq_class& tau, std::uint64_t N, const Real& delta,
                                const NalphaOptions& options, const Budget& budget) {
  if (x.dim() == 0) fail(ErrorKind::InvalidInput, "x must have dimension at least 1");
  if (tau <= 0) fail(ErrorKind::InvalidInput, "tau must be positive");
  if (N < 1) fail(ErrorKind::InvalidInput, "N must be at least 1");
  const mpz_class nz(static_cast<unsigned long>(N));
  const Real floor_delta = Real::power(nz, -1 / tau);
  if (compare(delta, floor_delta) < 0)
    fail(ErrorKind::InvalidInput, "delta below N^(-1/tau) = " + floor_delta.to_string());
  const long ell = static_cast<long>(x.dim());
  NalphaCheck out;
  CountQuery query;
  query.x = x;
  query.delta = delta;
  query.N = N;
  out.count = count_Q(query, budget).count;
  mpz_class four = 1;
  mpz_mul_2exp(four.get_mpz_t(), four.get_mpz_t(), static_cast<unsigned long>(2 * (ell + 1)));
  out.bound = Real(mpq_class(four * nz)) * delta.pow(ell);
  out.bound_enclosure = certify(out.bound, 128);
  const mpq_class c(mpz_class(static_cast<unsigned long>(out.count)));
  out.margin.lower = out.bound_enclosure.lower - c;
  out.margin.upper = out.bound_enclosure.upper - c;
  out.margin.precision_bits = out.bound_enclosure.precision_bits;
  if (compare(Real(c), out.bound) <= 0) {
    out.verdict = NalphaVerdict::Pass;
    out.reason = "count within bound";
    return out;
  }
  if (N < options.N_min) {
    out.verdict = NalphaVerdict::Inconclusive;
    out.reason = "bound exceeded below N_min = " + std::to_string(options.N_min) + "; the bound is asymptotic in N";
    return out;
  }
  out.verdict = NalphaVerdict::Fail;
  out.reason = "count exceeds bound";
  if (!options.probe) return out;
  // contrapositive: a failure forces a dual vector with |q| <= sb/δ, |⟨q,x⟩ + p| <= sb/N
  const mpq_class sb = exact_rational(options.search_bound);
  const CertifiedValue d = certify(delta, 128);
  const mpq_class qb = sb / d.lower;
  const mpz_class q_bound = qb.get_num() / qb.get_den();
  if (mpz_sizeinbase(q_bound.get_mpz_t(), 2) > 62) return out;
  out.witness = dual_search(x, q_bound.get_ui(), sb / mpq_class(nz), budget);
  if (out.witness) {
    std::int64_t qn = 0;
    for (auto v : out.witness->q) qn = std::max<std::int64_t>(qn, std::llabs(v));
    if (qn == 0) {
      out.witness_final_holds = true;
    } else {
      const mpfr_prec_t prec = 192;
      const Interval lsb = log(Interval::point(sb, prec));
      const Interval lq = log(Interval::point(static_cast<long>(qn), prec));
      const Interval t = Interval::point(tau, prec);
      const Interval rhs = exp((Interval::point(1, prec) + t) * lsb - t * lq);
      const Interval lhs = hull(out.witness->residual, prec);
      out.witness_final_holds = !rhs.certainly_less(lhs);  // not certainly violated
    }
  }
  return out;
}

}  // namespace dioph
