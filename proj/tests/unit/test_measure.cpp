#include <gtest/gtest.h>

#include <cmath>

#include "dioph/errors.hpp"
#include "dioph/measure.hpp"

using namespace dioph;

namespace {

MeasureExperiment experiment(const std::string& x, const std::string& psi, unsigned d, unsigned k,
                             std::uint64_t Q0, std::uint64_t Q_max, Sampling s) {
  MeasureExperiment e;
  e.x = RealVector::parse(x);
  e.psi = ApproxFunction::parse(psi);
  e.d = d;
  e.k = k;
  e.Q0 = Q0;
  e.Q_max = Q_max;
  e.sampling = s;
  return e;
}

}  // namespace

TEST(Measure, ThresholdAboveHalfGivesFullFraction) {
  auto r = approximable_fraction(experiment("golden", "const:6/10", 2, 1, 0, 50, Sampling::grid(100)));
  EXPECT_EQ(r.hits, 100u);
  EXPECT_EQ(r.fraction, 1.0);
  EXPECT_EQ(r.qualifying, 50u);
  for (const auto& p : r.records) EXPECT_EQ(p.first_witness, 1u);
}

TEST(Measure, ZeroThresholdGivesNothing) {
  auto r = approximable_fraction(experiment("golden", "const:0", 2, 1, 0, 1000, Sampling::grid(100)));
  EXPECT_EQ(r.hits, 0u);
  EXPECT_EQ(r.qualifying, 0u);
}

TEST(Measure, GridMidpoints) {
  auto p = make_samples(Sampling::grid(4), 1);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p.coordinate(0, 0), "1/8");
  EXPECT_EQ(p.coordinate(3, 0), "7/8");
  auto p2 = make_samples(Sampling::grid(9), 2);
  EXPECT_EQ(p2.coordinate(1, 0), "1/6");
  EXPECT_EQ(p2.coordinate(1, 1), "3/6");
  EXPECT_THROW(make_samples(Sampling::grid(10), 2), Error);
}

TEST(Measure, ExactTieIsNotAWitness) {
  // y = 3/8 and 5/8 sit exactly at distance 3/8
  auto r = approximable_fraction(experiment("0", "const:3/8", 2, 1, 0, 1, Sampling::grid(4)));
  EXPECT_EQ(r.hits, 2u);
  EXPECT_EQ(r.records[1].witness_count, 0u);
  EXPECT_EQ(r.undecided, 0u);
}

TEST(Measure, DimensionMismatchThrows) {
  EXPECT_THROW(approximable_fraction(experiment("golden", "q^-1/2", 3, 1, 0, 10, Sampling::grid(4))), Error);
}

// Frozen from a direct numpy scan (60-digit decimals for ‖q·x‖, integer test r²q < D² for y).
TEST(Measure, SqrtTwoTailProfileMatchesOracle) {
  const std::uint64_t Qs[] = {2000, 10000, 100000};
  const std::uint64_t hits[] = {9148, 9990, 10000};
  const std::uint64_t nq[] = {52, 274, 1138};
  for (int i = 0; i < 3; ++i) {
    auto r = approximable_fraction(experiment("sqrt2m1", "q^-1/2", 2, 1, 1000, Qs[i], Sampling::grid(10000)));
    EXPECT_EQ(r.hits, hits[i]) << Qs[i];
    EXPECT_EQ(r.qualifying, nq[i]) << Qs[i];
  }
}

TEST(Measure, SmallQWitnessesEverything) {
  // ψ(q) > 1/2 for q <= 3, so Q0 = 0 saturates at once
  for (std::uint64_t Q : {1000u, 10000u, 100000u}) {
    auto r = approximable_fraction(experiment("sqrt2m1", "q^-1/2", 2, 1, 0, Q, Sampling::grid(10000)));
    EXPECT_EQ(r.fraction, 1.0);
  }
}

TEST(Measure, WitnessSetsNestPointwise) {
  auto base = experiment("sqrt2m1", "q^-1/2", 2, 1, 500, 3000, Sampling::monte_carlo(2000, 7));
  auto r = approximable_fraction(base);
  auto more = base;
  more.Q_max = 20000;
  auto r_more = approximable_fraction(more);
  auto later = base;
  later.Q0 = 1500;
  auto r_later = approximable_fraction(later);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_LE(r.records[i].witness_count, r_more.records[i].witness_count);
    EXPECT_GE(r.records[i].witness_count, r_later.records[i].witness_count);
  }
  EXPECT_LE(r.hits, r_more.hits);
  EXPECT_GE(r.hits, r_later.hits);
}

TEST(Measure, MonteCarloIsSeeded) {
  auto e = experiment("sqrt2m1", "q^-1/2", 2, 1, 100, 5000, Sampling::monte_carlo(500, 42));
  auto a = approximable_fraction(e), b = approximable_fraction(e);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].witness_count, b.records[i].witness_count);
    EXPECT_EQ(a.points.coordinate(i, 0), b.points.coordinate(i, 0));
  }
  e.sampling.seed = 43;
  auto c = approximable_fraction(e);
  EXPECT_NE(a.points.coordinate(0, 0), c.points.coordinate(0, 0));
}

TEST(Measure, MonteCarloMatchesDirectCheck) {
  auto e = experiment("sqrt2m1", "q^-1/2", 2, 1, 100, 3000, Sampling::monte_carlo(200, 5));
  auto r = approximable_fraction(e);
  ScaledPoint sp(e.x);
  auto qs = qualifying_q(sp, e.psi, 101, 3000);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const long double y = std::ldexp(static_cast<long double>(r.points.numerators[i]), -64);
    std::uint32_t count = 0;
    for (auto q : qs) {
      const long double v = q * y;
      const long double f = v - std::floor(v);
      if (std::min(f, 1 - f) < 1 / std::sqrt(static_cast<long double>(q))) ++count;
    }
    EXPECT_EQ(r.records[i].witness_count, count) << i;
  }
}

TEST(Measure, PhiContrastMatchesOracle) {
  auto c = phi_contrast(RealVector::parse("sqrt2m1"), 2, 1000, 100000, Sampling::grid(10000));
  EXPECT_EQ(c.empirical.qualifying, 116u);
  EXPECT_EQ(c.empirical.hits, 1856u);
  const mpq_class oracle(0.2260422145606921);
  EXPECT_LT(c.union_bound.lower, oracle + mpq_class("1/1000000000000"));
  EXPECT_GT(c.union_bound.upper, oracle - mpq_class("1/1000000000000"));
  EXPECT_TRUE(c.within);
}

TEST(Measure, PhiContrastEmptyRange) {
  auto c = phi_contrast(RealVector::parse("sqrt2m1"), 2, 5000, 5000, Sampling::grid(100));
  EXPECT_EQ(c.empirical.hits, 0u);
  EXPECT_EQ(c.union_bound.upper, 0);
  EXPECT_THROW(phi_contrast(RealVector::parse("sqrt2m1"), 2, 1, 100, Sampling::grid(100)), Error);
}

TEST(Measure, PhiContrastRationalPointSumsEveryQ) {
  auto c = phi_contrast(RealVector::parse("0"), 2, 1000, 3000, Sampling::grid(100));
  EXPECT_EQ(c.empirical.qualifying, 2000u);
  long double s = 0;
  for (int q = 1001; q <= 3000; ++q) {
    const long double lq = std::log(static_cast<long double>(q));
    s += 2 / std::sqrt(q * lq * lq) * (q + 1) / q;
  }
  EXPECT_NEAR(c.union_bound.lower.get_d(), static_cast<double>(s), 1e-12);
  EXPECT_TRUE(c.within);
}

TEST(Measure, SubspaceMatchesOracle) {
  auto r = subspace_fraction(experiment("sqrt2m1", "q^-1/3", 3, 2, 1000, 100000, Sampling::grid(10000)));
  EXPECT_EQ(r.measure.qualifying, 6166u);
  EXPECT_EQ(r.measure.hits, 10000u);
  ASSERT_FALSE(r.series.empty());
  EXPECT_NEAR(r.series.back().sum.approx(), 22.52349402764013, 1e-9);
  for (std::size_t i = 1; i < r.series.size(); ++i) EXPECT_GE(r.series[i].sum.lower, r.series[i - 1].sum.lower);
}

TEST(Measure, SubspaceConvergentCaseIsSmall) {
  auto r = subspace_fraction(experiment("sqrt2m1", "q^-2", 3, 2, 100, 100000, Sampling::grid(10000)));
  EXPECT_LE(r.measure.fraction, 0.01);
  EXPECT_THROW(subspace_fraction(experiment("sqrt2m1", "q^-1/2", 2, 1, 0, 10, Sampling::grid(4))), Error);
}

TEST(Measure, DecompositionIdentityHoldsPerSample) {
  for (const char* psi : {"q^-1/2", "q^-1", "q^-3/4"}) {
    auto e = experiment("sqrt2m1", psi, 2, 1, 100, 20000, Sampling::grid(2000));
    auto rep = decomposition_check(e, ApproxFunction::phi(2));
    EXPECT_EQ(rep.violations, 0u) << psi;
    EXPECT_EQ(rep.spurious, 0u) << psi;
    EXPECT_GE(rep.max_hits, std::max(rep.phi_hits, rep.psi_hits));
  }
}
