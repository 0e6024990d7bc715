#include <gtest/gtest.h>

#include <random>

#include "dioph/lattice.hpp"

using namespace dioph;

namespace {

RealVector vec(const char* s) { return RealVector::parse(s); }

bool encloses(const CertifiedValue& c, double v, double tol) {
  return c.lower.get_d() - tol <= v && v <= c.upper.get_d() + tol;
}

// Independent oracle for rational x: enumerate every (m, q) in the box with exact mpq arithmetic.
std::uint64_t lattice_oracle(const std::vector<mpq_class>& x, std::int64_t N, const mpq_class& delta) {
  std::uint64_t total = 0;
  for (std::int64_t q = -(N - 1); q <= N - 1; ++q) {
    std::uint64_t prod = 1;
    for (const auto& xi : x) {
      const mpq_class c = xi * mpq_class(static_cast<long>(q));
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), c.get_num_mpz_t(), c.get_den_mpz_t());
      std::uint64_t k = 0;
      for (long m = f.get_si() - 2; m <= f.get_si() + 2; ++m) {
        mpq_class diff = mpq_class(m) - c;
        if (abs(diff) < delta) ++k;
      }
      prod *= k;
    }
    total += prod;
  }
  return total;
}

}  // namespace

TEST(Lattice, OneDimensionalRadius) {
  auto s = build_lattice(vec("golden"), 100, mpq_class(1, 10));
  EXPECT_TRUE(encloses(s.t, 3.4538776394910685, 1e-15));
  EXPECT_TRUE(encloses(s.R, 3.1622776601683793, 1e-15));
  EXPECT_LT(mpq_class(s.R.upper - s.R.lower).get_d(), 1e-30);
}

TEST(Lattice, NearUnitDelta) {
  auto s = build_lattice(vec("golden"), 1, mpq_class(999, 1000));
  EXPECT_TRUE(encloses(s.t, 0.00050025016679176675, 1e-18));
  EXPECT_TRUE(encloses(s.R, 0.99949987493746091, 1e-15));
}

TEST(Lattice, TwoDimensionalRoutesAgree) {
  auto s = build_lattice(vec("sqrt(2)-1,sqrt(3)-1"), 10000, mpq_class(1, 100));
  EXPECT_TRUE(encloses(s.t, 9.2103403719761827, 1e-14));
  // R = N^(1/3)·δ^(2/3) = 1
  EXPECT_TRUE(s.R.lower <= 1 && 1 <= s.R.upper);
  EXPECT_LE(s.R_scale.lower, s.R_decay.upper);
  EXPECT_LE(s.R_decay.lower, s.R_scale.upper);
}

TEST(Lattice, UnitDeterminant) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const std::uint64_t N = 1 + rng() % 100000;
    const mpq_class d(1 + static_cast<long>(rng() % 998), 1000);
    const char* xs[] = {"golden", "sqrt(2)-1,1/3", "1/7,sqrt(5)-2,2/9"};
    auto s = build_lattice(vec(xs[i % 3]), N, d);
    EXPECT_TRUE(s.det.lower <= 1 && 1 <= s.det.upper);
    EXPECT_LT(mpq_class(s.det.upper - s.det.lower).get_d(), 1e-25);
  }
}

TEST(Lattice, RejectsDeltaAtLeastOne) {
  EXPECT_THROW(build_lattice(vec("golden"), 10, mpq_class(1)), Error);
  EXPECT_THROW(build_lattice(vec("golden"), 10, mpq_class(0)), Error);
  try {
    build_lattice(vec("golden"), 10, mpq_class(3, 2));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(Lattice, ZeroPointCount) {
  for (std::uint64_t N : {1u, 2u, 10u, 1000u})
    for (const mpq_class& d : {mpq_class(1, 10), mpq_class(1, 2), mpq_class(9, 10)})
      EXPECT_EQ(count_lattice_points(build_lattice(vec("0"), N, d)), 2 * N - 1);
}

TEST(Lattice, HalfCount) { EXPECT_EQ(count_lattice_points(build_lattice(vec("1/2"), 10, mpq_class(3, 10))), 9u); }

TEST(Lattice, IdentityWithCountingEngine) {
  std::mt19937_64 rng(5);
  const char* xs[] = {"sqrt(2)-1", "golden", "1/3+1/7*sqrt(2)", "sqrt(2)-1,sqrt(3)-1", "2/7,5/13", "1/2,sqrt(5)-2,1/9"};
  for (int i = 0; i < 60; ++i) {
    const RealVector x = vec(xs[i % 6]);
    const std::uint64_t N = 1 + rng() % 3000;
    const mpq_class d(1 + static_cast<long>(rng() % 499), 1000);
    CountQuery cq;
    cq.x = x;
    cq.delta = Real(d);
    cq.N = N - 1;
    EXPECT_EQ(count_lattice_points(build_lattice(x, N, d)), 2 * count_Q(cq).count + 1) << xs[i % 6] << " " << N;
  }
}

TEST(Lattice, MatchesBoxOracleForWideDelta) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 40; ++i) {
    std::vector<mpq_class> xq;
    std::string lit;
    const int ell = 1 + i % 3;
    for (int j = 0; j < ell; ++j) {
      const long den = 2 + static_cast<long>(rng() % 40), num = static_cast<long>(rng() % den);
      xq.emplace_back(num, den);
      xq.back().canonicalize();
      lit += (j ? "," : "") + std::to_string(num) + "/" + std::to_string(den);
    }
    const std::int64_t N = 1 + static_cast<std::int64_t>(rng() % 200);
    const mpq_class d(1 + static_cast<long>(rng() % 99), 100);
    const auto got = count_lattice_points(build_lattice(vec(lit.c_str()), static_cast<std::uint64_t>(N), d));
    EXPECT_EQ(got, lattice_oracle(xq, N, d)) << lit << " N=" << N << " d=" << d.get_str();
    EXPECT_EQ(got % 2, 1u);
  }
}

TEST(Lattice, DualVectorForHalf) {
  auto v = dual_short_vector(build_lattice(vec("1/2"), 100, mpq_class(1, 10)), 1);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->q, std::vector<std::int64_t>{2});
  EXPECT_EQ(v->p, -1);
  EXPECT_TRUE(v->residual.is_exact());
  EXPECT_EQ(v->residual.lower, 0);
}

TEST(Lattice, DualVectorGoldenNone) {
  // min over q <= 20 of ‖q·golden‖ is 0.0344 at q = 13, far above 1/N
  EXPECT_FALSE(dual_short_vector(build_lattice(vec("golden"), 10000, mpq_class(1, 20)), 1).has_value());
  // widening the residual bound admits the Fibonacci pair q = 13, p = −8
  auto v = dual_search(vec("golden"), 20, mpq_class(35, 1000));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->q, std::vector<std::int64_t>{13});
  EXPECT_EQ(v->p, -8);
}

TEST(Lattice, DualVectorZeroPoint) {
  auto v = dual_short_vector(build_lattice(vec("0"), 50, mpq_class(1, 4)), 1);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->q, std::vector<std::int64_t>{1});
  EXPECT_EQ(v->p, 0);
}

TEST(Lattice, DualVectorImage) {
  auto s = build_lattice(vec("1/2"), 100, mpq_class(1, 10));
  auto v = dual_short_vector(s, 1);
  ASSERT_TRUE(v.has_value());
  // s = (e^(−t)·2, 0) with e^(−t) = R/N
  const double expect = 2 * std::sqrt(10.0) / 100;
  EXPECT_TRUE(encloses(v->sup_norm_image, expect, 1e-12));
}

TEST(Lattice, DualSearchMatchesBruteForce) {
  std::mt19937_64 rng(13);
  const char* xs[] = {"sqrt(2)-1,sqrt(3)-1", "golden,1/3", "sqrt(7)-2"};
  for (int i = 0; i < 15; ++i) {
    const RealVector x = vec(xs[i % 3]);
    const std::uint64_t Qb = 1 + rng() % 30;
    const mpq_class B(1 + static_cast<long>(rng() % 200), 10000);
    auto got = dual_search(x, Qb, B);
    // brute force: smallest |q|_∞ with a canonical hit
    std::uint64_t best = 0;
    const std::size_t ell = x.dim();
    const std::int64_t h = static_cast<std::int64_t>(Qb);
    std::vector<std::int64_t> q(ell, -h);
    for (;;) {
      std::int64_t m = 0;
      Surd z;
      for (std::size_t j = 0; j < ell; ++j) {
        m = std::max<std::int64_t>(m, std::llabs(q[j]));
        z += x[j].value() * mpq_class(static_cast<long>(q[j]));
      }
      if (m > 0 && compare(nearest_int_distance(z), Surd(B)) <= 0 && (best == 0 || static_cast<std::uint64_t>(m) < best))
        best = static_cast<std::uint64_t>(m);
      std::size_t j = 0;
      while (j < ell && q[j] == h) q[j++] = -h;
      if (j == ell) break;
      ++q[j];
    }
    if (best == 0) {
      EXPECT_FALSE(got.has_value());
    } else {
      ASSERT_TRUE(got.has_value());
      std::int64_t m = 0;
      for (auto c : got->q) m = std::max<std::int64_t>(m, std::llabs(c));
      EXPECT_EQ(static_cast<std::uint64_t>(m), best);
    }
  }
}

TEST(Lattice, DualSearchBudget) {
  Budget b;
  b.max_cells = 1000;
  EXPECT_THROW(dual_search(vec("golden,sqrt(2)-1"), 100, mpq_class(1, 1000000), b), Error);
  try {
    dual_short_vector(build_lattice(vec("golden,sqrt(2)-1"), 1000000, mpq_class(1, 100000)), 8);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
  }
}

TEST(Nalpha, QuadraticIrrational) {
  auto r = verify_nalpha_bound(vec("sqrt(2)-1"), mpq_class(3, 2), 10000, Real(mpq_class(1, 100)));
  EXPECT_EQ(r.verdict, NalphaVerdict::Pass);
  EXPECT_EQ(r.count, 199u);
  EXPECT_EQ(r.bound.rational(), 1600);
  EXPECT_EQ(r.margin.lower, 1401);
}

TEST(Nalpha, HalfBelowPreconditionRejected) {
  // 1/10 < 100^(−1/3) ≈ 0.2154
  EXPECT_THROW(verify_nalpha_bound(vec("1/2"), mpq_class(3), 100, Real(mpq_class(1, 10))), Error);
  auto r = verify_nalpha_bound(vec("1/2"), mpq_class(3), 100, Real(mpq_class(1, 4)));
  EXPECT_EQ(r.count, 50u);
  EXPECT_EQ(r.bound.rational(), 400);
  EXPECT_EQ(r.verdict, NalphaVerdict::Pass);
}

TEST(Nalpha, BoundaryInclusive) {
  EXPECT_NO_THROW(verify_nalpha_bound(vec("sqrt(2)-1"), mpq_class(3, 2), 1000, Real(mpq_class(1, 100))));
  EXPECT_THROW(verify_nalpha_bound(vec("sqrt(2)-1"), mpq_class(3, 2), 1000, Real(mpq_class(99, 10000))), Error);
  // irrational boundary δ = N^(−2/3) is exact as a monomial
  auto d = Real::power(10000, mpq_class(-2, 3));
  auto r = verify_nalpha_bound(vec("sqrt(2)-1"), mpq_class(3, 2), 10000, d);
  EXPECT_EQ(r.count, 43u);
  EXPECT_EQ(r.verdict, NalphaVerdict::Pass);
  EXPECT_NEAR(r.bound.approx(), 344.70955040510140, 1e-9);
}

TEST(Nalpha, FailureBelowNminIsInconclusive) {
  auto r = verify_nalpha_bound(vec("0"), mpq_class(1), 100, Real(mpq_class(1, 50)));
  EXPECT_EQ(r.count, 100u);
  EXPECT_EQ(r.verdict, NalphaVerdict::Inconclusive);
  EXPECT_FALSE(r.witness.has_value());
}

TEST(Nalpha, ContrapositiveProbe) {
  // x = 0 violates τ > τ_D(x); the failure must come with a dual witness
  auto r = verify_nalpha_bound(vec("0"), mpq_class(1), 2000, Real(mpq_class(1, 50)));
  EXPECT_EQ(r.verdict, NalphaVerdict::Fail);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(r.witness_final_holds);
  auto r2 = verify_nalpha_bound(vec("1/3,0"), mpq_class(2), 5000, Real(mpq_class(1, 60)));
  EXPECT_EQ(r2.verdict, NalphaVerdict::Fail);
  ASSERT_TRUE(r2.witness.has_value());
  EXPECT_TRUE(r2.witness_final_holds);
}

TEST(Nalpha, PropertyIrrationalPassesAboveNmin) {
  // badly approximable points: the bound holds for every admissible δ tried
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t N = 1000 + rng() % 20000;
    const mpq_class d(1 + static_cast<long>(rng() % 300), 1000);
    if (compare(Real(d), Real::power(mpz_class(static_cast<unsigned long>(N)), mpq_class(-2, 3))) < 0) continue;
    auto r = verify_nalpha_bound(vec(i % 2 ? "golden" : "sqrt(2)-1"), mpq_class(3, 2), N, Real(d));
    EXPECT_EQ(r.verdict, NalphaVerdict::Pass);
  }
}
