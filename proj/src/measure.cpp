#include "dioph/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dioph/errors.hpp"
#include "dioph/fixed.hpp"
#include "dioph/interval.hpp"

namespace dioph {

namespace {

using u128 = unsigned __int128;

std::string u128_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

mpz_class u128_mpz(u128 v) { return from_u128(v); }

std::uint64_t grid_side(std::uint64_t n, unsigned k) {
  auto pw = [k](std::uint64_t m) {
    u128 p = 1;
    for (unsigned i = 0; i < k; ++i) {
      p *= m;
      if (p > (static_cast<u128>(1) << 64)) return p;
    }
    return p;
  };
  std::uint64_t m = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / k)));
  for (std::uint64_t c = m > 1 ? m - 1 : 1; c <= m + 1; ++c)
    if (pw(c) == n) return c;
  fail(ErrorKind::InvalidInput, "grid size " + std::to_string(n) + " is not a perfect " + std::to_string(k) +
                                    "-th power");
}

// q with its admissible distance count: witness on an axis iff dist(q·a mod D) < limit.
struct Entry {
  std::uint64_t q = 0;
  std::uint64_t q_mod = 0;
  std::uint64_t limit = 0;
};

struct Compiled {
  std::vector<Entry> entries;
  std::uint64_t undecided = 0;
};

// limit = #{r >= 0 : r/D < ψ(q)} capped at D/2 + 1.
Compiled compile(const std::vector<std::uint64_t>& qs, const ApproxFunction& psi, u128 D) {
  Compiled out;
  out.entries.reserve(qs.size());
  const mpz_class Dz = u128_mpz(D);
  const mpz_class cap = Dz / 2 + 1;
  for (std::uint64_t q : qs) {
    const Real t = psi.value(q);
    const CertifiedValue c = certify(t, 128);
    mpz_class lo, hi;
    const mpq_class sl = c.lower * Dz, sh = c.upper * Dz;
    mpz_cdiv_q(lo.get_mpz_t(), sl.get_num_mpz_t(), sl.get_den_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), sh.get_num_mpz_t(), sh.get_den_mpz_t());
    if (lo < 0) lo = 0;
    if (hi > cap) hi = cap;
    if (lo > cap) lo = cap;
    mpz_class limit = lo;
    for (mpz_class r = lo; r < hi; ++r) {
      try {
        if (compare(Real(mpq_class(r, Dz)), t) < 0) {
          limit = r + 1;
          continue;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
        ++out.undecided;
      }
      break;
    }
    Entry en;
    en.q = q;
    en.q_mod = D == (static_cast<u128>(1) << 64) ? q : static_cast<std::uint64_t>(q % D);
    en.limit = limit.get_ui();
    out.entries.push_back(en);
  }
  return out;
}

std::vector<std::uint64_t> qualifying_range(const RealVector& x, const ApproxFunction& psi, std::uint64_t Q0,
                                            std::uint64_t Q_max, const Budget& budget) {
  if (Q_max <= Q0) return {};
  if (x.dim() == 0) {
    if (Q_max - Q0 > budget.max_scan_steps) fail(ErrorKind::BudgetExceeded, "qualifying q scan");
    std::vector<std::uint64_t> all;
    for (std::uint64_t q = Q0 + 1; q <= Q_max; ++q)
      if (certify(psi.value(q), 64).upper > 0) all.push_back(q);
    return all;
  }
  ScaledPoint sp(x);
  return qualifying_q(sp, psi, Q0 + 1, Q_max, budget);
}

// Per-point witness records for the compiled q list.
std::vector<PointRecord> scan_points(const SamplePoints& pts, const Compiled& comp, const Budget& budget) {
  const std::size_t n = pts.size();
  const std::uint64_t cells = static_cast<std::uint64_t>(n) * comp.entries.size();
  if (comp.entries.size() > 0 && cells / comp.entries.size() != n) fail(ErrorKind::BudgetExceeded, "sample scan");
  if (cells > budget.max_cells)
    fail(ErrorKind::BudgetExceeded, "sample scan needs " + std::to_string(cells) + " cells, budget " +
                                        std::to_string(budget.max_cells));
  std::vector<PointRecord> rec(n);
  const bool wrap = pts.denominator == (static_cast<u128>(1) << 64);
  const std::uint64_t D = wrap ? 0 : static_cast<std::uint64_t>(pts.denominator);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t* a = pts.numerators.data() + i * pts.k;
    PointRecord& r = rec[i];
    for (const Entry& e : comp.entries) {
      bool ok = true;
      for (unsigned j = 0; j < pts.k && ok; ++j) {
        std::uint64_t rr, dist;
        if (wrap) {
          rr = e.q_mod * a[j];
          dist = std::min(rr, static_cast<std::uint64_t>(0) - rr);
        } else {
          rr = (e.q_mod * a[j]) % D;
          dist = std::min(rr, D - rr);
        }
        ok = dist < e.limit;
      }
      if (!ok) continue;
      if (r.witness_count == 0) r.first_witness = e.q;
      ++r.witness_count;
    }
  }
  return rec;
}

void validate(const MeasureExperiment& exp) {
  if (exp.k < 1) fail(ErrorKind::InvalidInput, "fiber dimension k must be at least 1");
  if (exp.d != exp.x.dim() + exp.k)
    fail(ErrorKind::InvalidInput, "d must equal dim(x) + k (" + std::to_string(exp.x.dim()) + " + " +
                                      std::to_string(exp.k) + "), got " + std::to_string(exp.d));
  if (exp.Q_max < 1) fail(ErrorKind::InvalidInput, "Q_max must be at least 1");
  if (exp.sampling.n_points < 1) fail(ErrorKind::InvalidInput, "sampling needs at least one point");
}

MeasureResult summarize(const MeasureExperiment& exp, SamplePoints pts, const Compiled& comp,
                        std::vector<PointRecord> rec) {
  MeasureResult out;
  out.Q0 = exp.Q0;
  out.Q_max = exp.Q_max;
  out.n_points = pts.size();
  for (const PointRecord& r : rec)
    if (r.witness_count > 0) ++out.hits;
  out.fraction = out.n_points ? static_cast<double>(out.hits) / static_cast<double>(out.n_points) : 0.0;
  out.sigma = out.n_points ? std::sqrt(out.fraction * (1 - out.fraction) / static_cast<double>(out.n_points)) : 0.0;
  out.qualifying = comp.entries.size();
  out.undecided = comp.undecided;
  out.points = std::move(pts);
  out.records = std::move(rec);
  return out;
}

MeasureResult run_experiment(const MeasureExperiment& exp, const Budget& budget) {
  validate(exp);
  SamplePoints pts = make_samples(exp.sampling, exp.k);
  const std::vector<std::uint64_t> qs = qualifying_range(exp.x, exp.psi, exp.Q0, exp.Q_max, budget);
  const Compiled comp = compile(qs, exp.psi, pts.denominator);
  std::vector<PointRecord> rec = scan_points(pts, comp, budget);
  return summarize(exp, std::move(pts), comp, std::move(rec));
}

}  // namespace

const char* sampling_mode_name(Sampling::Mode m) {
  return m == Sampling::Mode::Grid ? "grid" : "monte-carlo";
}

std::string SamplePoints::coordinate(std::size_t point, unsigned axis) const {
  return std::to_string(numerators[point * k + axis]) + "/" + u128_string(denominator);
}

SamplePoints make_samples(const Sampling& s, unsigned k) {
  if (k < 1) fail(ErrorKind::InvalidInput, "sample dimension must be at least 1");
  if (s.n_points < 1) fail(ErrorKind::InvalidInput, "sampling needs at least one point");
  SamplePoints pts;
  pts.k = k;
  pts.numerators.resize(static_cast<std::size_t>(s.n_points) * k);
  if (s.mode == Sampling::Mode::Grid) {
    const std::uint64_t m = grid_side(s.n_points, k);
    if (m >= (1ULL << 31)) fail(ErrorKind::InvalidInput, "grid side too large");
    pts.denominator = 2 * static_cast<u128>(m);
    for (std::uint64_t i = 0; i < s.n_points; ++i) {
      std::uint64_t idx = i;
      // first axis varies slowest
      for (unsigned j = k; j-- > 0;) {
        pts.numerators[i * k + j] = 2 * (idx % m) + 1;
        idx /= m;
      }
    }
  } else {
    pts.denominator = static_cast<u128>(1) << 64;
    std::mt19937_64 gen(s.seed);
    for (auto& a : pts.numerators) a = gen();
  }
  return pts;
}

MeasureResult approximable_fraction(const MeasureExperiment& exp, const Budget& budget) {
  return run_experiment(exp, budget);
}

PhiContrast phi_contrast(const RealVector& x, unsigned d, std::uint64_t Q0, std::uint64_t Q_max,
                         const Sampling& sampling, const Budget& budget) {
  if (Q0 < 2) fail(ErrorKind::PreconditionViolated, "phi contrast needs Q0 >= 2");
  if (d <= x.dim()) fail(ErrorKind::InvalidInput, "d must exceed dim(x)");
  MeasureExperiment exp;
  exp.x = x;
  exp.psi = ApproxFunction::phi(d);
  exp.d = d;
  exp.k = d - static_cast<unsigned>(x.dim());
  exp.Q0 = Q0;
  exp.Q_max = std::max(Q_max, Q0);
  exp.sampling = sampling;
  validate(exp);

  PhiContrast out;
  SamplePoints pts = make_samples(sampling, exp.k);
  const std::vector<std::uint64_t> qs = qualifying_range(x, exp.psi, Q0, exp.Q_max, budget);
  const Compiled comp = compile(qs, exp.psi, pts.denominator);
  std::vector<PointRecord> rec = scan_points(pts, comp, budget);
  out.empirical = summarize(exp, std::move(pts), comp, std::move(rec));
  out.empirical.Q_max = Q_max;

  constexpr mpfr_prec_t kPrec = 128;
  Interval sum = Interval::point(0L, kPrec);
  for (std::uint64_t q : qs) {
    const Interval f = exp.psi.value(q).enclosure(kPrec) *
                       Interval::point(mpq_class(2 * mpz_class(static_cast<unsigned long>(q + 1)),
                                                 mpz_class(static_cast<unsigned long>(q))),
                                       kPrec);
    sum = sum + pow_si(f, static_cast<long>(exp.k));
  }
  out.union_bound.lower = sum.lower().to_rational();
  out.union_bound.upper = sum.upper().to_rational();
  out.union_bound.precision_bits = kPrec;
  out.within = out.empirical.fraction <= std::nextafter(out.union_bound.upper.get_d(), 2.0) + 3 * out.empirical.sigma;
  return out;
}

SubspaceResult subspace_fraction(const MeasureExperiment& exp, const Budget& budget) {
  if (exp.k < 2) fail(ErrorKind::InvalidInput, "subspace experiments need k >= 2");
  SubspaceResult out;
  out.measure = run_experiment(exp, budget);
  out.series = partial_series(exp.x, exp.psi, exp.k, exp.Q_max, budget);
  return out;
}

DecompositionReport decomposition_check(const MeasureExperiment& exp, const ApproxFunction& phi,
                                        const Budget& budget) {
  validate(exp);
  const ApproxFunction bar = ApproxFunction::pointwise_max(exp.psi, phi);
  const SamplePoints pts = make_samples(exp.sampling, exp.k);
  auto witnessed = [&](const ApproxFunction& f) {
    const Compiled comp = compile(qualifying_range(exp.x, f, exp.Q0, exp.Q_max, budget), f, pts.denominator);
    return scan_points(pts, comp, budget);
  };
  const auto rb = witnessed(bar), rf = witnessed(phi), rp = witnessed(exp.psi);
  DecompositionReport out;
  out.n_points = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool b = rb[i].witness_count > 0, f = rf[i].witness_count > 0, p = rp[i].witness_count > 0;
    out.max_hits += b;
    out.phi_hits += f;
    out.psi_hits += p;
    if (b && !f && !p) ++out.violations;
    if (!b && (f || p)) ++out.spurious;
  }
  return out;
}

}  // namespace dioph
