#include "dioph/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace dioph {

const char* exponent_kind_name(ExponentKind k) {
  switch (k) {
    case ExponentKind::TauD: return "tau_D";
    case ExponentKind::OmegaD: return "omega_D";
    case ExponentKind::OmegaS: return "omega_S";
  }
  return "tau_D";
}

namespace {

constexpr u128 kFastFloor = static_cast<u128>(1) << 60;  // distances above 2^-68 use the fixed-point value

unsigned block_of(std::uint64_t h) { return static_cast<unsigned>(64 - __builtin_clzll(h - 1)); }

struct Dist {
  double value = 0;
  bool zero = false;
};

// Distance from a fixed-point residue; tiny residues are settled by exact surd arithmetic.
Dist eval_dist(u128 g, const std::function<Surd()>& exact_dist) {
  Dist d;
  if (g >= kFastFloor) {
    d.value = std::ldexp(static_cast<double>(g), -128);
    return d;
  }
  Surd s = exact_dist();
  if (s.is_zero()) {
    d.zero = true;
    return d;
  }
  d.value = certify(s, 256).approx();
  return d;
}

class BlockTable {
 public:
  explicit BlockTable(std::uint64_t H) {
    const unsigned B = block_of(H);
    for (unsigned b = 1; b <= B; ++b) {
      BlockMax m;
      m.b = b;
      m.lo = 1ULL << (b - 1);
      m.hi = std::min<std::uint64_t>(H, b >= 64 ? H : (1ULL << b));
      blocks_.push_back(m);
    }
  }
  void offer(std::uint64_t h, double e, const std::vector<std::int64_t>& witness) {
    BlockMax& m = blocks_[block_of(h) - 1];
    if (!m.populated || e > m.value) {
      m.populated = true;
      m.value = e;
      m.witness = witness;
    }
  }
  std::vector<BlockMax>& blocks() { return blocks_; }

 private:
  std::vector<BlockMax> blocks_;
};

unsigned window_start(unsigned B, const Aggregation& agg) {
  if (agg.mode == Aggregation::Mode::FromBlock) return std::max(1u, agg.from_block);
  const double f = std::clamp(agg.fraction, 0.0, 1.0);
  return static_cast<unsigned>(std::floor(B * (1.0 - f))) + 1;
}

void aggregate(ExponentEstimate& est, const Aggregation& agg, bool clamp) {
  const unsigned B = est.blocks.empty() ? 0 : est.blocks.back().b;
  est.window_from = window_start(B, agg);
  std::vector<const BlockMax*> in_window;
  for (const auto& m : est.blocks)
    if (m.populated && m.b >= est.window_from) in_window.push_back(&m);
  if (in_window.empty()) {
    est.warnings.push_back("no populated block in the aggregation window; using all blocks");
    for (const auto& m : est.blocks)
      if (m.populated) in_window.push_back(&m);
  }
  double v = 0;
  bool any = false;
  for (const auto* m : in_window) {
    if (!any || m->value > v) v = m->value;
    any = true;
  }
  if (est.exact_resonance) v = kInfinity;
  if (clamp && v < 0) v = 0;
  est.value = v;
  // trend: is the window maximum still being set by the most recent blocks?
  est.still_increasing = false;
  if (in_window.size() >= 2) {
    const std::size_t n = in_window.size();
    double recent = std::max(in_window[n - 1]->value, in_window[n - 2]->value);
    double earlier = -kInfinity;
    for (std::size_t i = 0; i + 2 < n; ++i) earlier = std::max(earlier, in_window[i]->value);
    est.still_increasing = recent >= earlier;
  }
  if (est.exact_resonance) est.still_increasing = false;
  std::vector<std::pair<std::vector<std::int64_t>, double>> w;
  for (const auto* m : in_window) w.push_back({m->witness, m->value});
  std::stable_sort(w.begin(), w.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (w.size() > 10) w.resize(10);
  est.best_witnesses = std::move(w);
}

Surd inner(const RealVector& x, const std::vector<std::int64_t>& n) {
  Surd s;
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] != 0) s += x[i].value() * mpq_class(static_cast<long>(n[i]));
  return s;
}

struct Nearest {
  u128 dist;
  std::map<u128, std::int64_t>::const_iterator it;
};

Nearest nearest(const std::map<u128, std::int64_t>& set, u128 target) {
  auto hi = set.lower_bound(target);
  if (hi == set.end()) hi = set.begin();
  auto lo = hi == set.begin() ? std::prev(set.end()) : std::prev(hi);
  u128 dh = circ_dist(hi->first - target), dl = circ_dist(lo->first - target);
  return dh <= dl ? Nearest{dh, hi} : Nearest{dl, lo};
}

// All entries within `radius` of target, for exact resonance checks.
std::vector<std::int64_t> near_entries(const std::map<u128, std::int64_t>& set, u128 target, u128 radius) {
  std::vector<std::int64_t> out;
  auto it = set.lower_bound(target);
  auto fwd = it;
  for (std::size_t steps = 0; steps < set.size(); ++steps) {
    if (fwd == set.end()) fwd = set.begin();
    if (circ_dist(fwd->first - target) > radius) break;
    out.push_back(fwd->second);
    ++fwd;
  }
  auto back = it;
  for (std::size_t steps = 0; steps < set.size(); ++steps) {
    if (back == set.begin()) back = set.end();
    --back;
    if (circ_dist(back->first - target) > radius) break;
    out.push_back(back->second);
  }
  return out;
}

struct ScanState {
  ScanState(const RealVector& point, BlockTable t) : x(point), table(std::move(t)) {}
  const RealVector& x;
  BlockTable table;
  bool resonance = false;
  std::vector<std::int64_t> resonance_witness;
};

// Shell m, candidate n with fixed residue g; returns false when an exact resonance ends the scan.
bool offer(ScanState& st, std::uint64_t m, u128 g, const std::vector<std::int64_t>& n) {
  Dist d = eval_dist(g, [&] { return nearest_int_distance(inner(st.x, n)); });
  if (d.zero) {
    st.resonance = true;
    st.resonance_witness = n;
    st.table.offer(m, kInfinity, n);
    return false;
  }
  st.table.offer(m, -std::log(d.value) / std::log(static_cast<double>(m)), n);
  return true;
}

void scan_dim1(ScanState& st, std::uint64_t H, const std::vector<FixedFrac>& f) {
  for (std::uint64_t m = 2; m <= H; ++m) {
    const u128 v = static_cast<u128>(m) * f[0].value;
    if (!offer(st, m, circ_dist(v), {static_cast<std::int64_t>(m)})) return;
  }
}

void scan_dim2(ScanState& st, std::uint64_t H, const std::vector<FixedFrac>& f) {
  std::map<u128, std::int64_t> s1, s2;  // n1·F1 for |n1| < m; n2·F2 for |n2| <= m
  s1.emplace(0, 0);
  s2.emplace(0, 0);
  const u128 wsum = f[0].width + f[1].width;
  for (std::uint64_t m = 1; m <= H; ++m) {
    const std::int64_t sm = static_cast<std::int64_t>(m);
    const u128 mF1 = static_cast<u128>(m) * f[0].value, mF2 = static_cast<u128>(m) * f[1].value;
    s2.emplace(mF2, sm);
    s2.emplace(static_cast<u128>(0) - mF2, -sm);
    if (m >= 2) {
      const u128 err = static_cast<u128>(2 * m) * wsum + 4;
      // n = (m, n2): residue m·F1 + n2·F2, nearest n2·F2 to −m·F1
      const u128 tA = static_cast<u128>(0) - mF1;
      Nearest a = nearest(s2, tA);
      // n = (n1, m), |n1| < m
      const u128 tB = static_cast<u128>(0) - mF2;
      Nearest b = nearest(s1, tB);
      if (a.dist <= err || b.dist <= err) {
        // possible exact resonance: test every candidate inside the error radius exactly
        for (std::int64_t n2 : near_entries(s2, tA, 2 * err))
          if (!offer(st, m, 0, {sm, n2})) return;
        for (std::int64_t n1 : near_entries(s1, tB, 2 * err))
          if (!offer(st, m, 0, {n1, sm})) return;
      }
      if (a.dist <= b.dist) {
        if (!offer(st, m, a.dist, {sm, a.it->second})) return;
      } else {
        if (!offer(st, m, b.dist, {b.it->second, sm})) return;
      }
    }
    s1.emplace(mF1, sm);
    s1.emplace(static_cast<u128>(0) - mF1, -sm);
  }
}

void scan_brute(ScanState& st, std::uint64_t H, const std::vector<FixedFrac>& f) {
  const std::size_t ell = f.size();
  const std::int64_t h = static_cast<std::int64_t>(H);
  std::vector<std::int64_t> n(ell, -h);
  for (;;) {
    // canonical half: first nonzero coordinate positive
    std::size_t first = 0;
    while (first < ell && n[first] == 0) ++first;
    if (first < ell && n[first] > 0) {
      std::uint64_t m = 0;
      u128 v = 0;
      for (std::size_t i = 0; i < ell; ++i) {
        m = std::max<std::uint64_t>(m, static_cast<std::uint64_t>(std::llabs(n[i])));
        v += static_cast<u128>(static_cast<i128>(n[i])) * f[i].value;
      }
      if (m >= 2 && !offer(st, m, circ_dist(v), n)) return;
    }
    std::size_t i = 0;
    while (i < ell && n[i] == h) n[i++] = -h;
    if (i == ell) return;
    ++n[i];
  }
}

ExponentEstimate finish(ScanState& st, ExponentKind kind, std::uint64_t H, std::uint64_t effective, unsigned dim,
                        const Aggregation& agg, bool clamp) {
  ExponentEstimate est;
  est.kind = kind;
  est.height = H;
  est.effective_height = effective;
  est.dim = dim;
  est.blocks = std::move(st.table.blocks());
  est.exact_resonance = st.resonance;
  aggregate(est, agg, clamp);
  if (st.resonance) est.best_witnesses.insert(est.best_witnesses.begin(), {st.resonance_witness, kInfinity});
  return est;
}

}  // namespace

ExponentEstimate estimate_tau_D(const RealVector& x, std::uint64_t H, const Aggregation& agg, const Budget& budget) {
  if (H < 2) fail(ErrorKind::InvalidInput, "H must be at least 2");
  const std::size_t ell = x.dim();
  std::vector<FixedFrac> f;
  for (const auto& c : x.coords()) f.push_back(fixed_frac(c.value()));
  std::uint64_t effective = H;
  std::vector<std::string> warnings;
  if (ell <= 2) {
    if (H > budget.max_cells) fail(ErrorKind::BudgetExceeded, "height exceeds the enumeration budget");
  } else {
    const double cells = std::pow(2.0 * static_cast<double>(H) + 1, static_cast<double>(ell));
    if (cells > static_cast<double>(budget.max_cells)) {
      std::uint64_t h = 2;
      while (std::pow(2.0 * static_cast<double>(h + 1) + 1, static_cast<double>(ell)) <=
             static_cast<double>(budget.max_cells))
        ++h;
      effective = h;
      warnings.push_back("height degraded from " + std::to_string(H) + " to " + std::to_string(effective) +
                         " by the enumeration budget");
    }
  }
  ScanState st(x, BlockTable(effective));
  if (ell == 1) scan_dim1(st, effective, f);
  else if (ell == 2) scan_dim2(st, effective, f);
  else scan_brute(st, effective, f);
  ExponentEstimate est = finish(st, ExponentKind::TauD, H, effective, static_cast<unsigned>(ell), agg, false);
  est.warnings.insert(est.warnings.begin(), warnings.begin(), warnings.end());
  est.boundary_regime = std::isfinite(est.value) && std::fabs(est.value - static_cast<double>(ell + 1)) <= 0.05;
  return est;
}

ExponentEstimate omega_D_from_tau(const ExponentEstimate& tau, const Aggregation& agg) {
  ExponentEstimate est = tau;
  est.kind = ExponentKind::OmegaD;
  const double shift = static_cast<double>(tau.dim);
  for (auto& m : est.blocks)
    if (m.populated) m.value -= shift;
  est.warnings.erase(std::remove_if(est.warnings.begin(), est.warnings.end(),
                                    [](const std::string& w) { return w.rfind("no populated block", 0) == 0; }),
                     est.warnings.end());
  aggregate(est, agg, true);
  if (est.exact_resonance) est.best_witnesses.insert(est.best_witnesses.begin(), tau.best_witnesses.front());
  return est;
}

ExponentEstimate estimate_omega_D(const RealVector& x, std::uint64_t H, const Aggregation& agg, const Budget& budget) {
  return omega_D_from_tau(estimate_tau_D(x, H, agg, budget), agg);
}

ExponentEstimate estimate_omega_S(const RealVector& x_full, std::uint64_t Q_max, const Aggregation& agg,
                                  const Budget& budget) {
  if (Q_max < 2) fail(ErrorKind::InvalidInput, "Q_max must be at least 2");
  if (Q_max > budget.max_scan_steps) fail(ErrorKind::BudgetExceeded, "Q_max exceeds the scan budget");
  const std::size_t d = x_full.dim();
  std::vector<FixedFrac> f;
  for (const auto& c : x_full.coords()) f.push_back(fixed_frac(c.value()));
  ScanState st(x_full, BlockTable(Q_max));
  for (std::uint64_t q = 2; q <= Q_max; ++q) {
    u128 g = 0;
    for (std::size_t i = 0; i < d; ++i) g = std::max(g, circ_dist(static_cast<u128>(q) * f[i].value));
    Dist dist = eval_dist(g, [&] { return sup_norm_dist_exact(x_full, mpz_class(static_cast<unsigned long>(q))); });
    const std::vector<std::int64_t> w = {static_cast<std::int64_t>(q)};
    if (dist.zero) {
      st.resonance = true;
      st.resonance_witness = w;
      st.table.offer(q, kInfinity, w);
      break;
    }
    const double e = static_cast<double>(d) * (-std::log(dist.value) / std::log(static_cast<double>(q))) - 1.0;
    st.table.offer(q, e, w);
  }
  return finish(st, ExponentKind::OmegaS, Q_max, Q_max, static_cast<unsigned>(d), agg, true);
}

TransferenceCheck check_transference(double omega_D, double omega_S, unsigned d, double slack) {
  if (d == 0) fail(ErrorKind::InvalidInput, "d must be positive");
  if (std::isnan(omega_D) || std::isnan(omega_S) || omega_D < 0 || omega_S < 0 || slack < 0)
    fail(ErrorKind::InvalidInput, "transference inputs must be nonnegative");
  TransferenceCheck c;
  const double dd = static_cast<double>(d);
  if (std::isinf(omega_D)) {
    c.lower = d == 1 ? kInfinity : 1.0 / (dd - 1.0);
    c.upper = kInfinity;
  } else {
    c.lower = omega_D / (dd * dd + (dd - 1.0) * omega_D);
    c.upper = omega_D;
  }
  const bool lower_ok = std::isinf(c.lower) ? std::isinf(omega_S) : omega_S >= c.lower - slack;
  const bool upper_ok = std::isinf(c.upper) || omega_S <= c.upper + slack;
  c.pass = lower_ok && upper_ok;
  c.detail = !lower_ok ? "omega_S below the lower bound" : (!upper_ok ? "omega_S above omega_D" : "within bounds");
  return c;
}

std::vector<std::uint64_t> vwa_witnesses(const RealVector& x_full, const mpq_class& epsilon, std::uint64_t Q_max,
                                         const Budget& budget) {
  if (epsilon <= 0) fail(ErrorKind::InvalidInput, "epsilon must be positive");
  const mpq_class a = mpq_class(1, static_cast<unsigned long>(x_full.dim())) + epsilon;
  ScaledPoint sp(x_full);
  return qualifying_q(sp, ApproxFunction::power(a), 1, Q_max, budget);
}

ExtensionCheck extension_monotonicity(const RealVector& x, const RealExpr& y, std::uint64_t H, const Aggregation& agg,
                                      const Budget& budget) {
  ExtensionCheck c;
  c.base = estimate_tau_D(x, H, agg, budget);
  c.extended = estimate_tau_D(x.append(y), H, agg, budget);
  if (c.extended.exact_resonance) return c;
  if (c.base.exact_resonance || c.extended.effective_height < c.base.effective_height) {
    c.holds = false;
    return c;
  }
  for (std::size_t i = 0; i < c.base.blocks.size(); ++i) {
    const BlockMax& b = c.base.blocks[i];
    const BlockMax& e = c.extended.blocks[i];
    if (b.populated && (!e.populated || e.value < b.value)) c.holds = false;
  }
  if (c.extended.value < c.base.value) c.holds = false;
  return c;
}

}  // namespace dioph
