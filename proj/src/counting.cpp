#include "dioph/counting.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace dioph {

std::uint64_t to_u64(const mpz_class& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) fail(ErrorKind::InvalidInput, "value " + v.get_str() + " exceeds 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

namespace {

mpz_class Z(std::uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

void check_budget(std::uint64_t steps, const Budget& budget, const char* what) {
  if (steps > budget.max_scan_steps)
    fail(ErrorKind::BudgetExceeded, std::string(what) + ": " + std::to_string(steps) + " scan steps exceed the budget of " +
                                        std::to_string(budget.max_scan_steps));
}

CertifiedValue certify_real(const Real& v) { return certify(v, 64); }

CertifiedValue shift(const CertifiedValue& v, const mpq_class& s) {
  CertifiedValue out = v;
  out.lower += s;
  out.upper += s;
  return out;
}

}  // namespace

std::uint64_t count_range(const ScaledPoint& sp, const Real& t, std::uint64_t M, std::uint64_t N, unsigned threads,
                          std::vector<std::uint64_t>* witnesses, std::size_t witness_cap) {
  if (N <= M) return 0;
  const FixedThreshold ft = fixed_threshold(t);
  const std::uint64_t nblocks = (N - M + kCountBlock - 1) / kCountBlock;
  std::vector<std::uint64_t> counts(nblocks, 0);
  std::vector<std::vector<std::uint64_t>> wit(witnesses ? nblocks : 0);
  std::vector<std::exception_ptr> errors(nblocks);

  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t lo = M + 1 + b * kCountBlock;
    const std::uint64_t hi = std::min(N, lo + kCountBlock - 1);
    std::uint64_t c = 0;
    std::uint64_t q = lo;
    try {
      for (; q <= hi; ++q) {
        if (sp.dist_less(q, ft, t)) {
          ++c;
          if (witnesses && wit[b].size() < witness_cap) wit[b].push_back(q);
        }
      }
    } catch (const Error& e) {
      errors[b] = std::make_exception_ptr(Error(e.kind(), std::string(e.what()) + " (q = " + std::to_string(q) + ")"));
    }
    counts[b] = c;
  };

  const unsigned T = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(nblocks, 64))));
  if (T == 1) {
    for (std::uint64_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < T; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t b = w; b < nblocks; b += T) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::uint64_t total = 0;
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    if (errors[b]) std::rethrow_exception(errors[b]);
    total += counts[b];
    if (witnesses) {
      for (std::uint64_t q : wit[b]) {
        if (witnesses->size() >= witness_cap) break;
        witnesses->push_back(q);
      }
    }
  }
  return total;
}

CountReport count_Q(const CountQuery& query, const Budget& budget) {
  if (query.N < 1) fail(ErrorKind::InvalidInput, "N must be at least 1");
  if (query.M >= query.N) fail(ErrorKind::InvalidInput, "M must be below N");
  check_budget(query.N - query.M, budget, "count");
  CountReport r;
  r.M = query.M;
  r.N = query.N;
  if (query.delta) {
    r.threshold = *query.delta;
  } else if (query.psi) {
    r.threshold = query.psi->value(query.N);
  } else {
    fail(ErrorKind::InvalidInput, "a count needs delta or psi");
  }
  if (compare(r.threshold, Real(0)) < 0) fail(ErrorKind::InvalidInput, "threshold must be nonnegative");
  r.threshold_enclosure = certify_real(r.threshold);
  ScaledPoint sp(query.x, query.gamma ? &*query.gamma : nullptr);
  std::vector<std::uint64_t> wit;
  r.count = count_range(sp, r.threshold, query.M, query.N, query.threads, query.keep_witnesses ? &wit : nullptr,
                        query.witness_cap);
  if (query.keep_witnesses) {
    r.witnesses = std::move(wit);
    r.witnesses_truncated = r.witnesses.size() < r.count;
  }
  if (query.M == 0) {
    r.bound_applicable = true;
    Real nd = Real(mpq_class(Z(query.N))) * r.threshold.pow(static_cast<long>(query.x.dim()));
    r.lemma_lower_bound = shift(certify_real(nd), -1);
    // count >= N·δ^ℓ − 1  <=>  count + 1 >= N·δ^ℓ
    r.bound_satisfied = compare(Real(mpq_class(Z(r.count + 1))), nd) >= 0;
  }
  return r;
}

LowerBoundCheck verify_count_lower_bound(const RealVector& x, const mpq_class& delta, std::uint64_t N,
                                         const Budget& budget) {
  if (delta <= 0 || delta >= 1) fail(ErrorKind::InvalidInput, "delta must lie in (0, 1)");
  CountQuery q;
  q.x = x;
  q.delta = Real(delta);
  q.N = N;
  CountReport r = count_Q(q, budget);
  LowerBoundCheck c;
  c.count = r.count;
  c.bound = r.lemma_lower_bound;
  c.pass = r.bound_satisfied;
  c.margin.precision_bits = c.bound.precision_bits;
  c.margin.lower = mpq_class(Z(r.count)) - c.bound.upper;
  c.margin.upper = mpq_class(Z(r.count)) - c.bound.lower;
  return c;
}

std::vector<CountReport> block_counts(const RealVector& x, const ApproxFunction& psi, unsigned k, unsigned j_max,
                                      const Budget& budget) {
  if (k < 2) fail(ErrorKind::InvalidInput, "k must be at least 2");
  if (j_max < 1) fail(ErrorKind::InvalidInput, "j_max must be at least 1");
  const mpz_class top = ipow(k, j_max);
  if (top > Z(budget.max_scan_steps)) check_budget(budget.max_scan_steps + 1, budget, "block counts");
  ScaledPoint sp(x);
  std::vector<CountReport> out;
  for (unsigned j = 1; j <= j_max; ++j) {
    CountReport r;
    r.M = to_u64(ipow(k, j - 1));
    r.N = to_u64(ipow(k, j));
    r.threshold = psi.value(r.N);
    r.threshold_enclosure = certify_real(r.threshold);
    r.count = count_range(sp, r.threshold, r.M, r.N);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::uint64_t> qualifying_q(const ScaledPoint& sp, const ApproxFunction& psi, std::uint64_t lo,
                                        std::uint64_t hi, const Budget& budget) {
  std::vector<std::uint64_t> out;
  if (hi < lo) return out;
  check_budget(hi - lo + 1, budget, "qualifying q scan");
  constexpr std::uint64_t kSub = 256;
  for (std::uint64_t a = lo; a <= hi; a += kSub) {
    const std::uint64_t b = std::min(hi, a + kSub - 1);
    // ψ nonincreasing: ψ(a) bounds ψ(q) on [a, b] from above
    const Real upper = psi.value(a);
    const FixedThreshold fu = fixed_threshold(upper);
    if (fu.nonpositive) continue;
    for (std::uint64_t q = a; q <= b; ++q) {
      if (!sp.dist_less(q, fu, upper)) continue;
      const Real t = q == a ? upper : psi.value(q);
      if (q == a || sp.dist_less(q, fixed_threshold(t), t)) out.push_back(q);
    }
    if (b == hi) break;
  }
  return out;
}

std::vector<SeriesPoint> partial_series(const RealVector& x, const ApproxFunction& psi, unsigned k_exp,
                                        std::uint64_t Q_max, const Budget& budget) {
  if (Q_max < 1) fail(ErrorKind::InvalidInput, "Q_max must be at least 1");
  ScaledPoint sp(x);
  std::vector<std::uint64_t> qs = qualifying_q(sp, psi, 1, Q_max, budget);
  std::vector<SeriesPoint> out;
  constexpr mpfr_prec_t kPrec = 192;
  bool exact = true;
  mpq_class exact_sum = 0;
  Interval sum = Interval::point(0L, kPrec);
  std::size_t idx = 0;
  std::uint64_t checkpoint = 1;
  auto emit = [&](std::uint64_t Q) {
    SeriesPoint p;
    p.Q = Q;
    p.qualifying = idx;
    if (exact) {
      p.sum = CertifiedValue{exact_sum, exact_sum, kPrec};
    } else {
      p.sum.lower = sum.lower().to_rational();
      p.sum.upper = sum.upper().to_rational();
      p.sum.precision_bits = 96;
    }
    out.push_back(p);
  };
  while (true) {
    const std::uint64_t Q = std::min(checkpoint, Q_max);
    for (; idx < qs.size() && qs[idx] <= Q; ++idx) {
      Real term = psi.value(qs[idx]).pow(static_cast<long>(k_exp));
      if (exact && term.is_rational()) {
        exact_sum += term.rational();
        continue;
      }
      if (exact) {
        sum = Interval::point(exact_sum, kPrec);
        exact = false;
      }
      sum = sum + (term.is_rational() ? Interval::point(term.rational(), kPrec) : term.enclosure(kPrec));
    }
    emit(Q);
    if (Q == Q_max) break;
    checkpoint = checkpoint > Q_max / 2 ? Q_max : checkpoint * 2;
  }
  return out;
}

bool has_exact_resonance(const RealVector& x) {
  // rows: irrational parts of each coordinate over a common square-class basis
  std::vector<mpz_class> basis;
  for (const auto& c : x.coords())
    for (const auto& t : c.value().terms())
      if (std::find(basis.begin(), basis.end(), t.radicand) == basis.end()) basis.push_back(t.radicand);
  std::vector<std::vector<mpq_class>> rows;
  for (const auto& c : x.coords()) {
    std::vector<mpq_class> row(basis.size(), 0);
    for (const auto& t : c.value().terms()) {
      auto it = std::find(basis.begin(), basis.end(), t.radicand);
      row[static_cast<std::size_t>(it - basis.begin())] = t.coeff;
    }
    rows.push_back(row);
  }
  // rank < number of coordinates means a rational relation among the irrational parts
  std::size_t rank = 0;
  for (std::size_t col = 0; col < basis.size() && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      mpq_class f = rows[r][col] / rows[rank][col];
      for (std::size_t c2 = col; c2 < basis.size(); ++c2) rows[r][c2] -= f * rows[rank][c2];
    }
    ++rank;
  }
  return rank < rows.size();
}

NalphaReport verify_cor_nalpha(const RealVector& x, const ApproxFunction& psi, unsigned k, int ell_shift,
                               unsigned j_lo, unsigned j_hi, std::optional<mpq_class> C, const Budget& budget) {
  if (k < 2) fail(ErrorKind::InvalidInput, "k must be at least 2");
  if (j_lo > j_hi) fail(ErrorKind::InvalidInput, "empty j range");
  if (static_cast<int>(j_lo) + ell_shift < 0) fail(ErrorKind::InvalidInput, "j + shift must be nonnegative");
  const long d = static_cast<long>(x.dim()) + 1;
  const mpq_class c = C ? *C : mpq_class(ipow(4, static_cast<unsigned long>(d)));
  if (c <= 0) fail(ErrorKind::InvalidInput, "C must be positive");
  NalphaReport rep;
  rep.expected_failure = has_exact_resonance(x);
  ScaledPoint sp(x);
  std::uint64_t steps = 0;
  for (unsigned j = j_lo; j <= j_hi; ++j) {
    const mpz_class top = ipow(k, static_cast<unsigned long>(static_cast<int>(j) + ell_shift));
    steps += to_u64(top);
    check_budget(steps, budget, "nalpha corollary");
    NalphaRow row;
    row.j = j;
    const Real t = psi.value(ipow(k, j));
    row.count = count_range(sp, t, 0, to_u64(top));
    Real bound = Real(c * mpq_class(top)) * t.pow(d - 1);
    row.bound = certify_real(bound);
    row.pass = compare(Real(mpq_class(Z(row.count))), bound) <= 0;
    rep.rows.push_back(row);
  }
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    if (!rep.rows[i].pass) break;
    rep.j0 = rep.rows[i].j;
  }
  return rep;
}

}  // namespace dioph
