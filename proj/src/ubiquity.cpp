#include "dioph/ubiquity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace dioph {

const char* condition_state_name(ConditionState s) {
  switch (s) {
    case ConditionState::HoldsFrom: return "holds-from";
    case ConditionState::Fails: return "fails";
    case ConditionState::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

const char* measure_method_name(MeasureMethod m) {
  switch (m) {
    case MeasureMethod::Exact: return "exact";
    case MeasureMethod::Pairwise: return "pairwise-lower-bound";
    case MeasureMethod::None: return "none";
  }
  return "none";
}

namespace {

mpz_class unit_mpz() {
  mpz_class u = 1;
  mpz_mul_2exp(u.get_mpz_t(), u.get_mpz_t(), 64);
  return u;
}

// floor or ceil of v·2^64, clamped to [0, 2^64].
u128 to_units(const mpq_class& v, bool up) {
  if (v <= 0) return 0;
  mpz_class num = v.get_num() * unit_mpz(), r;
  if (up) mpz_cdiv_q(r.get_mpz_t(), num.get_mpz_t(), v.get_den_mpz_t());
  else mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), v.get_den_mpz_t());
  if (r >= unit_mpz()) return kUnit;
  return to_u128_mod(r);
}

// Radius enclosures in 2^-64 units, capped at 2^64.
struct RadiusUnits {
  u128 lo = 0, hi = 0;
};

RadiusUnits radius_units(const BallFamily& f, std::uint64_t q, const u128 a_lo, const u128 a_hi) {
  if (f.uniform_radius) return {a_lo, a_hi};
  return {a_lo / q, a_hi / q + (a_hi % q != 0)};
}

struct Stream {
  std::uint64_t q = 1, p = 0;
  u128 center = 0;  // floor(p·2^64/q)
  u128 base = 0, rem_step = 0, acc = 0;
  u128 r = 0;
  bool inner = false;

  i128 lo() const { return inner ? static_cast<i128>(center) + 1 - static_cast<i128>(r) : static_cast<i128>(center) - static_cast<i128>(r); }
  i128 hi() const { return inner ? static_cast<i128>(center) + static_cast<i128>(r) : static_cast<i128>(center) + 1 + static_cast<i128>(r); }
  bool advance() {
    if (p == q) return false;
    ++p;
    center += base;
    acc += rem_step;
    if (acc >= q) {
      ++center;
      acc -= q;
    }
    return true;
  }
};

// Merged intervals of the family in increasing order; `emit(lo, hi)` receives each merged interval.
template <class Emit>
void sweep(const BallFamily& f, bool inner, Emit&& emit) {
  const u128 a_lo = to_units(f.a.lower, false), a_hi = to_units(f.a.upper, true);
  std::vector<Stream> streams;
  for (std::uint64_t q : f.qs) {
    const RadiusUnits ru = radius_units(f, q, a_lo, a_hi);
    Stream s;
    s.q = q;
    s.base = kUnit / q;
    s.rem_step = kUnit % q;
    s.r = inner ? ru.lo : ru.hi;
    s.inner = inner;
    if (inner && s.r == 0) continue;
    streams.push_back(s);
  }
  using Item = std::pair<i128, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (std::size_t i = 0; i < streams.size(); ++i) heap.push({streams[i].lo(), i});
  bool open = false;
  i128 cur_lo = 0, cur_hi = 0;
  auto clip = [](i128 v) { return std::clamp<i128>(v, 0, static_cast<i128>(kUnit)); };
  while (!heap.empty()) {
    auto [lo, i] = heap.top();
    heap.pop();
    const i128 hi = streams[i].hi();
    if (streams[i].advance()) heap.push({streams[i].lo(), i});
    const i128 l = clip(lo), h = clip(hi);
    if (h < l) continue;
    if (!open) {
      cur_lo = l;
      cur_hi = h;
      open = true;
    } else if (l > cur_hi) {
      emit(static_cast<u128>(cur_lo), static_cast<u128>(cur_hi));
      cur_lo = l;
      cur_hi = h;
    } else {
      cur_hi = std::max(cur_hi, h);
    }
  }
  if (open) emit(static_cast<u128>(cur_lo), static_cast<u128>(cur_hi));
}

void check_ball_budget(const BallFamily& f, const Budget& budget) {
  if (f.ball_count() > budget.max_cells)
    fail(ErrorKind::BudgetExceeded, "ball family of " + std::to_string(f.ball_count()) + " balls exceeds the cell budget");
}

// A single q whose inner balls already cover [0, 1].
bool covers_alone(const BallFamily& f) {
  const u128 a_lo = to_units(f.a.lower, false), a_hi = to_units(f.a.upper, true);
  for (std::uint64_t q : f.qs) {
    const RadiusUnits ru = radius_units(f, q, a_lo, a_hi);
    // consecutive inner intervals [c_p + 1 − r, c_p + r] overlap when 2r >= 2^64/q + 2
    if (ru.lo >= kUnit || 2 * ru.lo * q >= kUnit + 2 * static_cast<u128>(q)) return true;
  }
  return false;
}

CertifiedValue certified_units(u128 lo, u128 hi) {
  CertifiedValue c;
  c.lower = units_to_rational(lo);
  c.upper = units_to_rational(hi);
  c.precision_bits = 64;
  return c;
}

std::vector<std::uint64_t> qualifying_fixed(const ScaledPoint& sp, const Real& t, std::uint64_t lo_excl,
                                            std::uint64_t hi_incl) {
  std::vector<std::uint64_t> w;
  if (hi_incl <= lo_excl) return w;
  count_range(sp, t, lo_excl, hi_incl, 1, &w, std::numeric_limits<std::size_t>::max());
  return w;
}

mpz_class Zu(std::uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

// c/(K·ψ^e) enclosure from ψ ∈ [lo, hi].
CertifiedValue scaled_inverse(const mpq_class& c, const mpz_class& K, const CertifiedValue& psi, unsigned e) {
  CertifiedValue out;
  mpq_class plo = 1, phi = 1;
  for (unsigned i = 0; i < e; ++i) {
    plo *= psi.lower;
    phi *= psi.upper;
  }
  if (plo <= 0) fail(ErrorKind::Domain, "psi must be positive for the ball radius");
  out.lower = c / (mpq_class(K) * phi);
  out.upper = c / (mpq_class(K) * plo);
  out.lower.canonicalize();
  out.upper.canonicalize();
  out.precision_bits = psi.precision_bits;
  return out;
}

}  // namespace

mpq_class units_to_rational(u128 units) {
  mpq_class r(from_u128(units), unit_mpz());
  r.canonicalize();
  return r;
}

IntervalUnion IntervalUnion::from_fixed(std::vector<FixedInterval> intervals) {
  IntervalUnion u;
  for (auto& iv : intervals) {
    iv.hi = std::min(iv.hi, kUnit);
    if (iv.lo <= iv.hi) u.iv_.push_back(iv);
  }
  std::sort(u.iv_.begin(), u.iv_.end(), [](const FixedInterval& a, const FixedInterval& b) { return a.lo < b.lo; });
  std::vector<FixedInterval> merged;
  for (const auto& iv : u.iv_) {
    if (!merged.empty() && iv.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, iv.hi);
    else merged.push_back(iv);
  }
  u.iv_ = std::move(merged);
  return u;
}

IntervalUnion IntervalUnion::from_rational(const std::vector<std::pair<mpq_class, mpq_class>>& intervals, Rounding r) {
  std::vector<FixedInterval> f;
  for (const auto& [lo, hi] : intervals) {
    if (hi < 0 || lo > 1 || lo > hi) continue;
    FixedInterval iv{to_units(lo, r == Rounding::Inner), to_units(hi, r == Rounding::Outer)};
    if (iv.lo <= iv.hi) f.push_back(iv);
  }
  return from_fixed(std::move(f));
}

u128 IntervalUnion::measure_units() const {
  u128 m = 0;
  for (const auto& iv : iv_) m += iv.hi - iv.lo;
  return m;
}

mpq_class IntervalUnion::measure() const { return units_to_rational(measure_units()); }

bool IntervalUnion::contains(const IntervalUnion& other) const {
  std::size_t i = 0;
  for (const auto& o : other.iv_) {
    while (i < iv_.size() && iv_[i].hi < o.lo) ++i;
    if (i == iv_.size() || iv_[i].lo > o.lo || iv_[i].hi < o.hi) return false;
  }
  return true;
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  std::vector<FixedInterval> all = iv_;
  all.insert(all.end(), other.iv_.begin(), other.iv_.end());
  return from_fixed(std::move(all));
}

BallUnion union_of_balls(const std::vector<Center>& centers, const RadiusRule& radius) {
  std::vector<std::pair<mpq_class, mpq_class>> in, out;
  for (const auto& c : centers) {
    if (c.q == 0) fail(ErrorKind::InvalidInput, "center denominator must be positive");
    const mpq_class x(Zu(c.p), Zu(c.q));
    const CertifiedValue r = radius(c.q);
    if (r.upper <= 0) fail(ErrorKind::InvalidInput, "radii must be positive");
    in.push_back({x - r.lower, x + r.lower});
    out.push_back({x - r.upper, x + r.upper});
  }
  BallUnion b;
  b.balls = centers.size();
  b.inner = IntervalUnion::from_rational(in, Rounding::Inner);
  b.outer = IntervalUnion::from_rational(out, Rounding::Outer);
  b.measure.lower = b.inner.measure();
  b.measure.upper = b.outer.measure();
  b.measure.precision_bits = 64;
  return b;
}

std::uint64_t BallFamily::ball_count() const {
  std::uint64_t n = 0;
  for (auto q : qs) n += q + 1;
  return n;
}

CertifiedValue family_measure(const BallFamily& family, const Budget& budget) {
  if (family.qs.empty()) return certified_units(0, 0);
  if (covers_alone(family)) return certified_units(kUnit, kUnit);
  check_ball_budget(family, budget);
  u128 in = 0, out = 0;
  sweep(family, true, [&](u128 lo, u128 hi) { in += hi - lo; });
  sweep(family, false, [&](u128 lo, u128 hi) { out += hi - lo; });
  return certified_units(in, out);
}

BallUnion family_union(const BallFamily& family, const Budget& budget) {
  BallUnion b;
  b.balls = family.ball_count();
  if (!family.qs.empty() && covers_alone(family)) {
    b.inner = b.outer = IntervalUnion::from_fixed({{0, kUnit}});
  } else {
    check_ball_budget(family, budget);
    std::vector<FixedInterval> in, out;
    sweep(family, true, [&](u128 lo, u128 hi) { in.push_back({lo, hi}); });
    sweep(family, false, [&](u128 lo, u128 hi) { out.push_back({lo, hi}); });
    b.inner = IntervalUnion::from_fixed(std::move(in));
    b.outer = IntervalUnion::from_fixed(std::move(out));
  }
  b.measure = certified_units(b.inner.measure_units(), b.outer.measure_units());
  return b;
}

PairwiseBound pairwise_lower_bound(const std::vector<std::uint64_t>& qs, const mpq_class& radius,
                                   std::size_t max_family) {
  PairwiseBound out;
  const u128 R = to_units(radius, false);  // r' = R·2^-64 <= r, so bounds for r' hold for r
  if (R == 0 || qs.empty()) return out;
  for (auto q : qs)
    if (2 * R * q >= kUnit) {
      out.lower = 1;
      out.used = 1;
      return out;
    }
  // Bonferroni over individual balls: λ(∪B) >= Σλ(B) − Σ_{pairs} λ(B ∩ B'). Balls of one q are
  // disjoint (2r' < 1/q), and the qq' ball pairs of q ≠ q' meet at circular distances g·m/(qq').
  std::vector<std::uint64_t> order(qs.rbegin(), qs.rend());
  std::vector<std::uint64_t> chosen;
  i128 total = 0;  // in 2^-64 units
  const long double unit = std::ldexp(1.0L, 64);
  for (std::uint64_t q : order) {
    if (chosen.size() >= max_family) break;
    const i128 single = static_cast<i128>(2 * R * q);
    i128 overlap = 0;
    for (std::uint64_t qq : chosen) {
      const std::uint64_t g = std::gcd(q, qq);
      const u128 prod = static_cast<u128>(q) * qq;
      // M = ceil(2R·qq'/(g·2^64)) − 1: the largest m with g·m/(qq') < 2r'
      u128 num;
      mpz_class big;
      std::uint64_t M;
      if (__builtin_mul_overflow(2 * R, prod, &num)) {
        big = from_u128(2 * R) * from_u128(prod);
        mpz_class den = from_u128(static_cast<u128>(g) << 64), m;
        mpz_cdiv_q(m.get_mpz_t(), big.get_mpz_t(), den.get_mpz_t());
        M = m.get_ui() - 1;
      } else {
        const u128 den = static_cast<u128>(g) << 64;
        M = static_cast<std::uint64_t>((num + den - 1) / den) - 1;
      }
      ++out.pairs;
      // g·[(2M+1)·2R − floor-low(g·M(M+1)·2^64/(qq'))]
      const long double second =
          static_cast<long double>(g) * static_cast<long double>(M) * static_cast<long double>(M + 1) * unit /
          static_cast<long double>(prod);
      const long double second_low = std::floor(second * (1.0L - std::ldexp(1.0L, -56))) - 1;
      const i128 first = static_cast<i128>(2 * M + 1) * static_cast<i128>(2 * R);
      const i128 per = first - static_cast<i128>(std::max(0.0L, second_low));
      overlap += static_cast<i128>(g) * std::max<i128>(per, 0);
      if (overlap >= single) break;
    }
    if (overlap < single) {
      total += single - overlap;
      chosen.push_back(q);
    }
  }
  out.used = chosen.size();
  out.lower = units_to_rational(static_cast<u128>(std::clamp<i128>(total, 0, static_cast<i128>(kUnit))));
  return out;
}

bool nreq_holds(const ApproxFunction& psi, unsigned d, std::uint64_t N) {
  if (d < 2) fail(ErrorKind::InvalidInput, "(Nreq) needs d >= 2");
  const Real v = psi.value(N);
  const Real lower = Real::power(Zu(N), mpq_class(-1, static_cast<long>(d - 1)));
  return compare(lower, v) < 0 && compare(v, Real(1)) < 0;
}

namespace {

BallFamily mink_family(const RealVector& x, const ApproxFunction& psi, std::uint64_t N, CoverReport& rep,
                       const Budget& budget) {
  const unsigned d = static_cast<unsigned>(x.dim()) + 1;
  if (N < 1) fail(ErrorKind::InvalidInput, "N must be positive");
  if (N > budget.max_scan_steps) fail(ErrorKind::BudgetExceeded, "N exceeds the scan budget");
  if (!nreq_holds(psi, d, N))
    fail(ErrorKind::PreconditionViolated, "(Nreq) N^(-1/(d-1)) < psi(N) < 1 fails at N = " + std::to_string(N));
  rep.N = N;
  rep.d = d;
  const Real t = psi.value(N);
  rep.psi_N = certify(t, 128);
  ScaledPoint sp(x);
  BallFamily f;
  f.qs = qualifying_fixed(sp, t, 0, N);
  f.a = scaled_inverse(2, Zu(N), rep.psi_N, d - 1);
  rep.qualifying = f.qs.size();
  rep.balls = f.ball_count();
  return f;
}

}  // namespace

CoverReport mink_cover(const RealVector& x, const ApproxFunction& psi, std::uint64_t N, const Budget& budget) {
  CoverReport rep;
  BallFamily f = mink_family(x, psi, N, rep, budget);
  rep.measure = family_measure(f, budget);
  return rep;
}

BallUnion mink_cover_union(const RealVector& x, const ApproxFunction& psi, std::uint64_t N, const Budget& budget) {
  CoverReport rep;
  return family_union(mink_family(x, psi, N, rep, budget), budget);
}

UbiquityReport check_conditions(const RealVector& x, const ApproxFunction& psi, unsigned d, unsigned k,
                                const mpq_class& c, unsigned j_lo, unsigned j_hi, const UbiquityOptions& options,
                                const Budget& budget) {
  if (k < 2) fail(ErrorKind::InvalidInput, "k must be at least 2");
  if (d < 2 || d != x.dim() + 1) fail(ErrorKind::InvalidInput, "d must equal dim(x) + 1 and be at least 2");
  if (j_lo < 1 || j_lo > j_hi) fail(ErrorKind::InvalidInput, "j range must satisfy 1 <= j_lo <= j_hi");
  if (c <= 0) fail(ErrorKind::InvalidInput, "c must be positive");
  UbiquityReport rep;
  rep.k = k;
  rep.c = c;
  rep.d = d;
  rep.j_lo = j_lo;
  rep.j_hi_requested = j_hi;
  rep.kappa_floor = options.kappa_floor;
  unsigned j_eff = j_lo - 1;
  for (unsigned j = j_lo; j <= j_hi; ++j) {
    const mpz_class N = ipow(k, j);
    if (N > Zu(budget.max_scan_steps)) break;
    j_eff = j;
  }
  rep.j_hi = j_eff;
  if (j_eff < j_hi)
    rep.warnings.push_back("j range truncated to " + std::to_string(j_eff) + " by the scan budget (k^j <= " +
                           std::to_string(budget.max_scan_steps) + ")");
  ScaledPoint sp(x);
  const bool displacement = c >= 2 * static_cast<long>(k);
  std::vector<std::pair<unsigned, CertifiedValue>> sums;
  if (j_eff >= j_lo) sums = condensed_partial_sums(psi, d, k, j_eff);
  for (unsigned j = j_lo; j <= j_eff; ++j) {
    UbiquityRow row;
    row.j = j;
    const std::uint64_t N = ipow(k, j).get_ui(), L = ipow(k, j - 1).get_ui();
    const Real t = psi.value(N);
    const CertifiedValue psiN = certify(t, 128);
    row.nreq = nreq_holds(psi, d, N);
    BallFamily block, small;
    block.qs = qualifying_fixed(sp, t, L, N);
    small.qs = qualifying_fixed(sp, t, 0, L);
    row.block_count = block.qs.size();
    row.small_count = small.qs.size();
    const bool positive = psiN.lower > 0;
    if (!positive) {
      row.method = MeasureMethod::Exact;
      row.u_measure = certified_units(0, 0);
      row.small_mass = certified_units(0, 0);
      row.small_mass_exact = true;
    } else {
      block.uniform_radius = true;
      block.a = scaled_inverse(c, ipow(k, 2 * j), psiN, d - 1);
      if (block.qs.empty() || covers_alone(block) || block.ball_count() <= budget.max_cells) {
        row.method = MeasureMethod::Exact;
        row.u_measure = family_measure(block, budget);
      } else {
        row.method = MeasureMethod::Pairwise;
        const PairwiseBound pb = pairwise_lower_bound(block.qs, block.a.lower, options.pairwise_family);
        row.u_measure.lower = pb.lower;
        row.u_measure.upper = 1;
        row.u_measure.precision_bits = 0;
      }
      small.a = scaled_inverse(2, Zu(N), psiN, d - 1);
      if (small.qs.empty() || covers_alone(small) || small.ball_count() <= budget.max_cells) {
        row.small_mass = family_measure(small, budget);
        row.small_mass_exact = true;
      } else {
        // each q contributes min(1, 2a) on [0, 1]
        const mpq_class n(Zu(small.qs.size()));
        row.small_mass.lower = std::min(mpq_class(1), mpq_class(2 * small.a.lower));
        row.small_mass.upper = std::min(mpq_class(1), mpq_class(n * 2 * small.a.upper));
        row.small_mass.precision_bits = 0;
      }
    }
    row.u_lower = row.u_measure.lower;
    // mink covering at N = k^j and block part ⊆ (U) union give (U) >= 1 − small-q mass
    if (displacement && row.nreq) row.u_lower = std::max(row.u_lower, mpq_class(1 - row.small_mass.upper));
    const double a = psi.approx(N), b = psi.approx(N * static_cast<std::uint64_t>(k));
    row.r_ratio = a > 0 ? b / (static_cast<double>(k) * a) : 0;
    row.d_partial = sums[j - 1].second;
    row.d_normalized.lower = row.d_partial.lower / c;
    row.d_normalized.upper = row.d_partial.upper / c;
    row.d_normalized.precision_bits = row.d_partial.precision_bits;
    rep.rows.push_back(std::move(row));
  }
  // (U): smallest j0 with every tested j >= j0 at or above the floor
  const mpq_class floor_q(options.kappa_floor);
  if (rep.rows.empty()) {
    rep.U.state = ConditionState::Inconclusive;
    rep.U.note = "no j inside the budget";
  } else if (rep.rows.back().u_lower < floor_q) {
    rep.U.state = ConditionState::Fails;
    rep.U.note = "measure lower bound below the kappa floor at the last tested j";
  } else {
    std::size_t i = rep.rows.size();
    while (i > 0 && rep.rows[i - 1].u_lower >= floor_q) --i;
    rep.U.state = ConditionState::HoldsFrom;
    rep.U.j0 = rep.rows[i].j;
    mpq_class kw = rep.rows[i].u_lower;
    for (std::size_t r = i; r < rep.rows.size(); ++r) kw = std::min(kw, rep.rows[r].u_lower);
    rep.kappa_witness = kw.get_d();
    rep.U.note = "over tested range j <= " + std::to_string(rep.j_hi);
  }
  {
    std::size_t i = rep.rows.size();
    while (i > 0 && rep.rows[i - 1].nreq && mpq_class(1 - rep.rows[i - 1].small_mass.upper) >= floor_q) --i;
    if (rep.rows.empty()) {
      rep.displacement.state = ConditionState::Inconclusive;
    } else if (i == rep.rows.size()) {
      rep.displacement.state = ConditionState::Fails;
      rep.displacement.note = rep.rows.back().small_mass_exact ? "small-q mass above 1 - kappa floor at the last tested j"
                                                               : "only a union bound on the small-q mass at the last tested j";
    } else {
      rep.displacement.state = ConditionState::HoldsFrom;
      rep.displacement.j0 = rep.rows[i].j;
    }
  }
  if (rep.rows.empty()) {
    rep.R.state = rep.D.state = ConditionState::Inconclusive;
    return rep;
  }
  const RegularityResult reg = check_u_regular(psi, k, j_lo, rep.j_hi);
  rep.R.state = reg.holds ? ConditionState::HoldsFrom : ConditionState::Fails;
  rep.R.j0 = j_lo;
  if (reg.kappa_defined) rep.R.note = "witnessed kappa " + reg.witnessed_kappa.to_string();
  const unsigned M = std::max(rep.j_hi, 16u);
  const auto dsums = condensed_partial_sums(psi, d, k, M);
  std::vector<CertifiedValue> terms;
  for (unsigned m = 1; m <= M; ++m) {
    const mpz_class km = ipow(k, m);
    terms.push_back(certify(Real(mpq_class(km)) * psi.value(km).pow(static_cast<long>(d)), 128));
  }
  const DivergenceVerdict dv = classify_terms(dsums, terms);
  rep.D.note = dv.reason;
  rep.D.j0 = j_lo;
  rep.D.state = dv.verdict == DivergenceVerdict::Verdict::Diverges   ? ConditionState::HoldsFrom
                : dv.verdict == DivergenceVerdict::Verdict::Converges ? ConditionState::Fails
                                                                      : ConditionState::Inconclusive;
  return rep;
}

SelectKResult select_k(const RealVector& x, const ApproxFunction& psi, unsigned d, const std::vector<unsigned>& k_values,
                       unsigned j_lo, unsigned j_hi, const UbiquityOptions& options, const Budget& budget) {
  if (k_values.empty()) fail(ErrorKind::InvalidInput, "k search range is empty");
  std::vector<unsigned> ks = k_values;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  SelectKResult out;
  for (unsigned k : ks) {
    out.tried.push_back(check_conditions(x, psi, d, k, mpq_class(2 * static_cast<long>(k)), j_lo, j_hi, options, budget));
    if (out.tried.back().U.state == ConditionState::HoldsFrom) {
      out.k = k;
      break;
    }
  }
  return out;
}

bool block_inside_u_union(const RealVector& x, const ApproxFunction& psi, unsigned d, unsigned k, unsigned j,
                          const mpq_class& c, const Budget& budget) {
  if (d != x.dim() + 1 || k < 2 || j < 1) fail(ErrorKind::InvalidInput, "invalid containment query");
  const std::uint64_t N = ipow(k, j).get_ui(), L = ipow(k, j - 1).get_ui();
  const Real t = psi.value(N);
  const CertifiedValue psiN = certify(t, 128);
  ScaledPoint sp(x);
  BallFamily mink, u;
  mink.qs = u.qs = qualifying_fixed(sp, t, L, N);
  mink.a = scaled_inverse(2, Zu(N), psiN, d - 1);
  u.uniform_radius = true;
  u.a = scaled_inverse(c, ipow(k, 2 * j), psiN, d - 1);
  const BallUnion a = family_union(mink, budget), b = family_union(u, budget);
  return b.inner.contains(a.outer);
}

}  // namespace dioph
