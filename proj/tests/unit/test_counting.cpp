#include <gtest/gtest.h>

#include <random>

#include "dioph/counting.hpp"

using namespace dioph;

namespace {

// Independent oracle for rational points: exact mpq arithmetic, no shared kernel.
std::uint64_t rational_oracle(const std::vector<mpq_class>& x, const mpq_class& delta, std::uint64_t M,
                              std::uint64_t N, const std::vector<mpq_class>& gamma = {}) {
  std::uint64_t c = 0;
  for (std::uint64_t q = M + 1; q <= N; ++q) {
    bool ok = true;
    for (std::size_t i = 0; i < x.size() && ok; ++i) {
      mpq_class v = x[i] * mpq_class(static_cast<unsigned long>(q));
      if (!gamma.empty()) v += gamma[i];
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
      mpq_class fr = v - f;
      mpq_class d = fr > mpq_class(1, 2) ? mpq_class(1 - fr) : fr;
      ok = d < delta;
    }
    c += ok;
  }
  return c;
}

CountReport count(const char* x, const mpq_class& delta, std::uint64_t N, std::uint64_t M = 0) {
  CountQuery q;
  q.x = RealVector::parse(x);
  q.delta = Real(delta);
  q.M = M;
  q.N = N;
  return count_Q(q);
}

}  // namespace

TEST(CountQ, Examples) {
  CountReport a = count("1/2", mpq_class(3, 10), 10);
  EXPECT_EQ(a.count, 5u);
  EXPECT_TRUE(a.bound_applicable);
  EXPECT_EQ(a.lemma_lower_bound.lower, 2);
  EXPECT_TRUE(a.lemma_lower_bound.is_exact());
  EXPECT_TRUE(a.bound_satisfied);
  EXPECT_EQ(count("0", mpq_class(1, 10), 7).count, 7u);
}

TEST(CountQ, PsiThresholdUsesPsiOfN) {
  CountQuery q;
  q.x = RealVector::parse("1/3");
  q.psi = ApproxFunction::power(mpq_class(1, 2));
  q.N = 16;  // ψ(16) = 1/4
  CountReport r = count_Q(q);
  EXPECT_EQ(r.threshold.rational(), mpq_class(1, 4));
  EXPECT_EQ(r.count, rational_oracle({mpq_class(1, 3)}, mpq_class(1, 4), 0, 16));
}

TEST(CountQ, WitnessesAreOptInAndCapped) {
  CountQuery q;
  q.x = RealVector::parse("1/2");
  q.delta = Real(mpq_class(3, 10));
  q.N = 10;
  EXPECT_TRUE(count_Q(q).witnesses.empty());
  q.keep_witnesses = true;
  q.witness_cap = 3;
  CountReport r = count_Q(q);
  EXPECT_EQ(r.witnesses, (std::vector<std::uint64_t>{2, 4, 6}));
  EXPECT_TRUE(r.witnesses_truncated);
}

TEST(CountQ, BudgetExceeded) {
  Budget b;
  b.max_scan_steps = 1000;
  CountQuery q;
  q.x = RealVector::parse("sqrt2m1");
  q.delta = Real(mpq_class(1, 10));
  q.N = 5000;
  try {
    count_Q(q, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
  }
}

TEST(LowerBound, Examples) {
  LowerBoundCheck a = verify_count_lower_bound(RealVector::parse("1/3"), mpq_class(1, 4), 12);
  EXPECT_EQ(a.count, 4u);
  EXPECT_EQ(a.bound.lower, 2);
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(a.margin.lower, 2);
  LowerBoundCheck b = verify_count_lower_bound(RealVector::parse("0,0"), mpq_class(1, 2), 5);
  EXPECT_EQ(b.count, 5u);
  EXPECT_TRUE(b.pass);
  LowerBoundCheck c = verify_count_lower_bound(RealVector::parse("golden"), mpq_class(1, 20), 10);
  EXPECT_LE(c.bound.upper, 0);
  EXPECT_TRUE(c.pass);
}

TEST(BlockCounts, Examples) {
  auto a = block_counts(RealVector::parse("0"), ApproxFunction::constant(mpq_class(1, 2)), 2, 3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].count, 1u);
  EXPECT_EQ(a[1].count, 2u);
  EXPECT_EQ(a[2].count, 4u);
  // blocks (1,2], (2,4], (4,8]: even q are 2 | 4 | 6, 8
  auto b = block_counts(RealVector::parse("1/2"), ApproxFunction::constant(mpq_class(3, 10)), 2, 3);
  EXPECT_EQ(b[0].count, 1u);
  EXPECT_EQ(b[1].count, 1u);
  EXPECT_EQ(b[2].count, 2u);
}

TEST(BlockCounts, PartitionIdentity) {
  for (const char* x : {"1/2", "sqrt2m1", "golden,2/7", "0"}) {
    for (unsigned k : {2u, 3u, 5u}) {
      ApproxFunction psi = ApproxFunction::constant(mpq_class(1, 5));
      auto blocks = block_counts(RealVector::parse(x), psi, k, 6);
      std::uint64_t sum = 0;
      for (const auto& r : blocks) sum += r.count;
      CountQuery q;
      q.x = RealVector::parse(x);
      q.delta = Real(mpq_class(1, 5));
      q.M = 1;
      q.N = blocks.back().N;
      EXPECT_EQ(sum, count_Q(q).count) << x << " k=" << k;
    }
  }
}

TEST(PartialSeries, Examples) {
  auto a = partial_series(RealVector::parse("0"), ApproxFunction::power(mpq_class(1, 2)), 1, 4);
  ASSERT_EQ(a.back().Q, 4u);
  // 1 + 2^(-1/2) + 3^(-1/2) + 1/2 = 2.7844570503761732...
  EXPECT_LE(a.back().sum.lower, mpq_class("27844570503761733/10000000000000000"));
  EXPECT_GE(a.back().sum.upper, mpq_class("27844570503761732/10000000000000000"));
  auto b = partial_series(RealVector::parse("1/2"), ApproxFunction::constant(mpq_class(1, 4)), 2, 10);
  EXPECT_TRUE(b.back().sum.is_exact());
  EXPECT_EQ(b.back().sum.lower, mpq_class(5, 16));
  auto c = partial_series(RealVector::parse("sqrt2m1"), ApproxFunction::constant(0), 1, 100);
  for (const auto& p : c) EXPECT_EQ(p.sum.upper, 0);
  std::vector<std::uint64_t> qs;
  for (const auto& p : a) qs.push_back(p.Q);
  EXPECT_EQ(qs, (std::vector<std::uint64_t>{1, 2, 4}));
}

TEST(CorNalpha, BadlyApproximableQuadratic) {
  // enumeration oracle: counts 9, 13, ..., 1910 against 16·2^j·2^(-9j/20)
  NalphaReport r = verify_cor_nalpha(RealVector::parse("sqrt2m1"), ApproxFunction::power(mpq_class(9, 20)), 2, 0, 4,
                                     18, mpq_class(16));
  const std::uint64_t expected[] = {9, 13, 19, 28, 42, 61, 90, 132, 194, 285, 416, 608, 892, 1305, 1910};
  ASSERT_EQ(r.rows.size(), 15u);
  for (std::size_t i = 0; i < 15; ++i) {
    EXPECT_EQ(r.rows[i].count, expected[i]) << "j=" << r.rows[i].j;
    EXPECT_TRUE(r.rows[i].pass);
  }
  ASSERT_TRUE(r.j0.has_value());
  EXPECT_LE(*r.j0, 8u);
  EXPECT_FALSE(r.expected_failure);
}

TEST(CorNalpha, RationalPointFailsAndIsFlagged) {
  NalphaReport r = verify_cor_nalpha(RealVector::parse("0"), ApproxFunction::power(mpq_class(9, 20)), 2, 0, 4, 14,
                                     mpq_class(16));
  EXPECT_TRUE(r.expected_failure);
  EXPECT_FALSE(r.rows.back().pass);
  EXPECT_FALSE(r.j0.has_value());
}

TEST(CorNalpha, ConstantHalfNeedsCAtLeastOne) {
  ApproxFunction psi = ApproxFunction::constant(mpq_class(1, 2));
  NalphaReport ok = verify_cor_nalpha(RealVector::parse("1/2"), psi, 2, 1, 2, 8, mpq_class(1));
  for (const auto& row : ok.rows) {
    EXPECT_EQ(row.count, (1u << (row.j + 1)) / 2);
    EXPECT_TRUE(row.pass);
  }
  NalphaReport bad = verify_cor_nalpha(RealVector::parse("1/2"), psi, 2, 1, 2, 8, mpq_class(99, 100));
  for (const auto& row : bad.rows) EXPECT_FALSE(row.pass);
}

TEST(Resonance, Detection) {
  EXPECT_TRUE(has_exact_resonance(RealVector::parse("1/2")));
  EXPECT_TRUE(has_exact_resonance(RealVector::parse("sqrt2m1,1+3*sqrt(2)")));
  EXPECT_TRUE(has_exact_resonance(RealVector::parse("sqrt(2),sqrt(8)")));
  EXPECT_FALSE(has_exact_resonance(RealVector::parse("sqrt2m1,golden")));
  EXPECT_FALSE(has_exact_resonance(RealVector::parse("sqrt(2),sqrt(3),sqrt(6)")));
}

// Invariants

TEST(CountingProperty, MatchesRationalOracle) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    const long D = static_cast<long>(rng() % 60) + 1;
    std::vector<mpq_class> x = {mpq_class(static_cast<long>(rng() % 200), D), mpq_class(static_cast<long>(rng() % 200), D)};
    for (auto& v : x) v.canonicalize();
    mpq_class delta(static_cast<long>(rng() % 99) + 1, 100);
    delta.canonicalize();
    const std::uint64_t N = rng() % 400 + 1;
    CountQuery q;
    q.x = RealVector(std::vector<RealExpr>{RealExpr::from_rational(x[0]), RealExpr::from_rational(x[1])});
    q.delta = Real(delta);
    q.N = N;
    EXPECT_EQ(count_Q(q).count, rational_oracle(x, delta, 0, N));
  }
}

TEST(CountingProperty, MonotoneInDeltaAndN) {
  for (const char* x : {"sqrt2m1", "golden,1/3", "3/7+1/2*sqrt(7)"}) {
    std::uint64_t prev = 0;
    for (long num = 1; num <= 10; ++num) {
      std::uint64_t c = count(x, mpq_class(num, 20), 3000).count;
      EXPECT_GE(c, prev);
      prev = c;
    }
    prev = 0;
    for (std::uint64_t N = 100; N <= 3000; N += 290) {
      std::uint64_t c = count(x, mpq_class(1, 7), N).count;
      EXPECT_GE(c, prev);
      prev = c;
    }
    // exact partition identity at a fixed threshold
    EXPECT_EQ(count(x, mpq_class(1, 7), 3000).count,
              count(x, mpq_class(1, 7), 1234).count + count(x, mpq_class(1, 7), 3000, 1234).count);
  }
}

TEST(CountingProperty, CountLowerBoundOnRandomExactInputs) {
  std::mt19937_64 rng(32);
  const char* quadratics[] = {"sqrt2m1", "golden", "1/3+2/5*sqrt(7)", "-1+sqrt(3)", "2/9*sqrt(11)"};
  for (int i = 0; i < 120; ++i) {
    const unsigned ell = static_cast<unsigned>(rng() % 3) + 1;
    std::string lit;
    for (unsigned c = 0; c < ell; ++c) {
      if (c) lit += ",";
      if (rng() % 2) lit += quadratics[rng() % 5];
      else lit += std::to_string(rng() % 1000) + "/" + std::to_string(rng() % 999 + 1);
    }
    mpq_class delta(static_cast<long>(rng() % 999) + 1, 1000);
    delta.canonicalize();
    LowerBoundCheck c = verify_count_lower_bound(RealVector::parse(lit), delta, rng() % 2000 + 1);
    EXPECT_TRUE(c.pass) << lit << " " << delta;
  }
}

TEST(CountingProperty, ShiftInequality) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 40; ++i) {
    const char* x = i % 2 ? "sqrt2m1,golden" : "2/7";
    RealVector xv = RealVector::parse(x);
    std::string g;
    for (std::size_t c = 0; c < xv.dim(); ++c) g += (c ? "," : "") + std::to_string(rng() % 1000) + "/1000";
    mpq_class delta(static_cast<long>(rng() % 90) + 10, 200);
    delta.canonicalize();
    const std::uint64_t N = rng() % 2000 + 1;
    CountQuery plain;
    plain.x = xv;
    plain.delta = Real(delta);
    plain.N = N;
    CountQuery shifted = plain;
    shifted.delta = Real(mpq_class(delta / 2));
    shifted.gamma = RealVector::parse(g);
    EXPECT_GE(count_Q(plain).count + 1, count_Q(shifted).count) << x << " γ=" << g;
  }
}

TEST(CountingProperty, ShiftedCountMatchesOracle) {
  CountQuery q;
  q.x = RealVector::parse("2/7,5/11");
  q.delta = Real(mpq_class(1, 9));
  q.gamma = RealVector::parse("1/3,3/10");
  q.N = 700;
  EXPECT_EQ(count_Q(q).count, rational_oracle({mpq_class(2, 7), mpq_class(5, 11)}, mpq_class(1, 9), 0, 700,
                                               {mpq_class(1, 3), mpq_class(3, 10)}));
}

TEST(CountingProperty, IndependentOfPartitioning) {
  CountQuery q;
  q.x = RealVector::parse("sqrt2m1,golden");
  q.delta = Real(mpq_class(1, 30));
  q.N = 400000;
  q.keep_witnesses = true;
  q.threads = 1;
  CountReport one = count_Q(q);
  q.threads = 4;
  CountReport four = count_Q(q);
  EXPECT_EQ(one.count, four.count);
  EXPECT_EQ(one.witnesses, four.witnesses);
}
