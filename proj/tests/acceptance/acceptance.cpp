// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed below.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dioph/counting.hpp"
#include "dioph/errors.hpp"
#include "dioph/exponents.hpp"
#include "dioph/lattice.hpp"
#include "dioph/measure.hpp"
#include "dioph/ubiquity.hpp"
#include "harness.hpp"

using namespace dioph;

namespace {

constexpr unsigned kSeed = 20240611;

// criterion 1
constexpr int kCountCases = 1000;
constexpr std::uint64_t kCountMaxN = 10000;
constexpr double kCountSeconds = 60;
// criterion 2
constexpr double kNalphaSeconds = 120;
// criterion 3
constexpr double kGoldenLo = 1.00, kGoldenHi = 1.05;
constexpr double kPairLo = 1.9, kPairHi = 2.1;
// criterion 4
constexpr int kTransferenceRational = 90;
constexpr std::uint64_t kTransferenceHeight = 100000;
constexpr double kTransferenceSlack = 0.05;
constexpr double kTransferenceViolationRate = 0.02;
// criterion 5
constexpr int kCoverCases = 100;
constexpr std::uint64_t kCoverMaxN = 2000;
const mpq_class kCoverTolerance("1/1000000000");
// criterion 6
constexpr unsigned kRegularJ = 30;
constexpr unsigned kSeriesM = 60;
// criterion 7
constexpr unsigned kUbiquityJ = 14;
constexpr double kKappaFloor = 0.05;
constexpr double kUbiquitySeconds = 600;
// criterion 8
constexpr std::uint64_t kGridPoints = 10000;
constexpr double kDivergenceFloor = 0.9;
// criterion 9
constexpr double kUnionCap = 0.5;
constexpr double kSigmas = 3;
// criterion 10
constexpr int kIdentityCases = 200;
constexpr std::uint64_t kIdentityMaxN = 2000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

class Random {
 public:
  explicit Random(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(gen_);
  }
  // p/q in (0, 1)
  mpq_class unit_rational(std::uint64_t max_den) {
    const std::uint64_t q = uniform(2, max_den);
    mpq_class r(mpz_class(static_cast<unsigned long>(uniform(1, q - 1))), mpz_class(static_cast<unsigned long>(q)));
    r.canonicalize();
    return r;
  }
  // rational p/q or quadratic a + b·√c, as a literal
  std::string coordinate() {
    static const unsigned radicands[] = {2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19};
    if (uniform(0, 1) == 0) return unit_rational(1000).get_str();
    const std::string a = unit_rational(50).get_str();
    const std::string b = unit_rational(50).get_str();
    const unsigned c = radicands[uniform(0, 11)];
    return a + (uniform(0, 1) ? "+" : "-") + b + "*sqrt(" + std::to_string(c) + ")";
  }
  std::string point(unsigned dim) {
    std::string s;
    for (unsigned i = 0; i < dim; ++i) s += (i ? "," : "") + coordinate();
    return s;
  }

 private:
  std::mt19937_64 gen_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Random rng(kSeed + 1);
  int failures = 0;
  for (int i = 0; i < kCountCases; ++i) {
    const unsigned ell = static_cast<unsigned>(rng.uniform(1, 3));
    const RealVector x = RealVector::parse(rng.point(ell));
    const mpq_class delta = rng.unit_rational(1000);
    const std::uint64_t N = rng.uniform(1, kCountMaxN);
    if (!verify_count_lower_bound(x, delta, N).pass) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < kCountSeconds,
          std::to_string(kCountCases) + " cases, " + std::to_string(failures) + " failures, " + num(secs, 3) + " s"};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const RealVector x = RealVector::parse("sqrt2m1");
  const mpq_class tau(3, 2);
  bool ok = true;
  std::string detail;
  for (unsigned long N : {1000UL, 10000UL, 100000UL, 1000000UL}) {
    const Real delta = Real::power(mpz_class(N), -1 / tau);
    const NalphaCheck c = verify_nalpha_bound(x, tau, N, delta);
    // 16·N·δ for ℓ = 1, compared exactly
    const bool within = compare(Real(mpq_class(mpz_class(static_cast<unsigned long>(c.count)))),
                                delta * Real(mpq_class(mpz_class(16 * N)))) <= 0;
    ok = ok && within && c.verdict == NalphaVerdict::Pass;
    detail += "N=" + std::to_string(N) + ": " + std::to_string(c.count) + " <= " + num(c.bound.approx()) + "; ";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < kNalphaSeconds, detail + num(secs, 3) + " s"};
}

Outcome criterion3() {
  const ExponentEstimate g = estimate_tau_D(RealVector::parse("golden"), 100000);
  const ExponentEstimate p = estimate_tau_D(RealVector::parse("sqrt2m1,-1+1*sqrt(3)"), 1000);
  const ExponentEstimate h = estimate_tau_D(RealVector::parse("1/2"), 100000);
  const bool g_ok = g.value >= kGoldenLo && g.value <= kGoldenHi;
  const bool p_ok = p.value >= kPairLo && p.value <= kPairHi;
  const bool h_ok = h.exact_resonance && h.value == kInfinity;
  return {g_ok && p_ok && h_ok, "golden " + num(g.value, 8) + (g_ok ? " in " : " outside ") + "[" + num(kGoldenLo) +
                                    ", " + num(kGoldenHi) + "]; (sqrt2-1, sqrt3-1) " + num(p.value, 8) +
                                    (p_ok ? " in " : " outside ") + "[" + num(kPairLo) + ", " + num(kPairHi) +
                                    "]; 1/2 " + (h_ok ? "exact resonance" : "no resonance")};
}

Outcome criterion4() {
  Random rng(kSeed + 4);
  std::vector<std::string> points;
  // rational points of denominator q <= 10^4: x = (p1/q, p2/q)
  for (int i = 0; i < kTransferenceRational; ++i) {
    const std::uint64_t q = rng.uniform(2, 10000);
    mpq_class a(mpz_class(static_cast<unsigned long>(rng.uniform(0, q - 1))), mpz_class(static_cast<unsigned long>(q)));
    mpq_class b(mpz_class(static_cast<unsigned long>(rng.uniform(0, q - 1))), mpz_class(static_cast<unsigned long>(q)));
    a.canonicalize();
    b.canonicalize();
    points.push_back(a.get_str() + "," + b.get_str());
  }
  for (const char* p : {"sqrt2m1,-1+1*sqrt(3)", "golden,-2+1*sqrt(7)", "-2+1*sqrt(6),-3+1*sqrt(10)",
                        "-3+1*sqrt(11),-3+1*sqrt(13)", "1/3+1/3*sqrt(2),-2+1*sqrt(5)", "-4+1*sqrt(17),-4+1*sqrt(19)",
                        "0+1/2*sqrt(3),1/5+1/7*sqrt(14)", "-4+1*sqrt(21),-4+1*sqrt(23)",
                        "-5+1*sqrt(29),-5+1*sqrt(31)", "2/3-1/4*sqrt(2),-1+1/3*sqrt(15)"})
    points.push_back(p);
  int violations = 0, unflagged = 0;
  std::string first;
  for (const std::string& s : points) {
    const RealVector x = RealVector::parse(s);
    const ExponentEstimate wd = estimate_omega_D(x, kTransferenceHeight);
    const ExponentEstimate ws = estimate_omega_S(x, kTransferenceHeight);
    const TransferenceCheck t = check_transference(wd.value, ws.value, 2, kTransferenceSlack);
    if (t.pass) continue;
    ++violations;
    if (!wd.still_increasing && !ws.still_increasing) {
      ++unflagged;
      if (first.empty()) first = "; first unflagged x=(" + s + ") " + t.detail;
    }
  }
  const int allowed = static_cast<int>(kTransferenceViolationRate * static_cast<double>(points.size()));
  return {violations <= allowed && unflagged == 0, std::to_string(points.size()) + " points, " +
                                                       std::to_string(violations) + " violations (allowed " +
                                                       std::to_string(allowed) + "), " + std::to_string(unflagged) +
                                                       " without non-convergence flag" + first};
}

Outcome criterion5() {
  Random rng(kSeed + 5);
  int failures = 0, cases = 0;
  std::uint64_t balls = 0;
  while (cases < kCoverCases) {
    const unsigned d = static_cast<unsigned>(rng.uniform(2, 3));
    const RealVector x = RealVector::parse(rng.point(d - 1));
    ApproxFunction psi = ApproxFunction::constant(0);
    if (rng.uniform(0, 1)) {
      // 0 < a < 1/(d−1)
      const std::uint64_t den = rng.uniform(2, 40);
      const std::uint64_t top = (den - 1) / (d - 1);
      if (top < 1) continue;
      psi = ApproxFunction::power(mpq_class(mpz_class(static_cast<unsigned long>(rng.uniform(1, top))),
                                            mpz_class(static_cast<unsigned long>(den * (d - 1) + 1))));
    } else {
      psi = ApproxFunction::constant(rng.unit_rational(20));
    }
    const std::uint64_t N = rng.uniform(10, kCoverMaxN);
    if (!nreq_holds(psi, d, N)) continue;
    ++cases;
    const CoverReport r = mink_cover(x, psi, N);
    balls += r.balls;
    if (r.measure.lower < 1 - kCoverTolerance) ++failures;
  }
  return {failures == 0, std::to_string(cases) + " cases, " + std::to_string(failures) + " below 1 - 1e-9, " +
                             std::to_string(balls) + " balls"};
}

Outcome criterion6() {
  bool ok = true;
  std::string detail;
  for (unsigned d : {2u, 3u}) {
    const ApproxFunction psi = ApproxFunction::power(mpq_class(1, d));
    for (unsigned k : {2u, 3u, 4u}) {
      const RegularityResult r = check_u_regular(psi, k, 1, kRegularJ);
      bool exact = r.holds;
      for (const auto& [j, ratio] : r.ratios) exact = exact && compare(ratio, Real(mpq_class(1, k))) <= 0;
      ok = ok && exact;
      if (!exact) detail += "(R) fails d=" + std::to_string(d) + " k=" + std::to_string(k) + "; ";
    }
    const auto sums = condensed_partial_sums(psi, d, 2, kSeriesM);
    for (const auto& [M, s] : sums) {
      const bool exact = s.is_exact() && s.lower == mpq_class(M);
      ok = ok && exact;
      if (!exact) detail += "(D) sum " + s.to_string() + " != " + std::to_string(M) + "; ";
    }
  }
  if (detail.empty())
    detail = "(R) ratio <= 1/k for d in {2,3}, k in {2,3,4}, j <= " + std::to_string(kRegularJ) +
             "; (D) partial sums = M exactly for M <= " + std::to_string(kSeriesM);
  return {ok, detail};
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<unsigned> ks;
  for (unsigned k = 2; k <= 64; ++k) ks.push_back(k);
  UbiquityOptions opt;
  opt.kappa_floor = kKappaFloor;
  const SelectKResult r =
      select_k(RealVector::parse("sqrt2m1"), ApproxFunction::power(mpq_class(9, 20)), 2, ks, 1, kUbiquityJ, opt);
  const double secs = seconds_since(t0);
  if (!r.k) return {false, "no k found in 2..64, " + num(secs, 3) + " s"};
  const UbiquityReport& rep = r.tried.back();
  const bool ok = rep.k == *r.k && rep.c == 2 * mpz_class(*r.k) && rep.j_hi == kUbiquityJ &&
                  rep.U.state == ConditionState::HoldsFrom && rep.kappa_witness >= kKappaFloor && secs < kUbiquitySeconds;
  return {ok, "k=" + std::to_string(*r.k) + ", c=" + rep.c.get_str() + ", (U) holds from j=" + std::to_string(rep.U.j0) +
                  " through j=" + std::to_string(rep.j_hi) + ", kappa witness " + num(rep.kappa_witness) + ", " +
                  num(secs, 3) + " s"};
}

Outcome criterion8() {
  MeasureExperiment e;
  e.x = RealVector::parse("sqrt2m1");
  e.psi = ApproxFunction::power(mpq_class(1, 2));
  e.d = 2;
  e.k = 1;
  e.sampling = Sampling::grid(kGridPoints);
  bool ok = true;
  double prev = -1, last = 0;
  std::string detail;
  for (std::uint64_t Q : {1000ULL, 10000ULL, 100000ULL, 1000000ULL}) {
    e.Q_max = Q;
    const MeasureResult m = approximable_fraction(e);
    ok = ok && m.fraction >= prev && m.undecided == 0;
    prev = last = m.fraction;
    detail += "Q_max=" + std::to_string(Q) + ": " + num(m.fraction) + "; ";
  }
  ok = ok && last >= kDivergenceFloor;
  return {ok, detail + "floor " + num(kDivergenceFloor)};
}

Outcome criterion9() {
  const PhiContrast c = phi_contrast(RealVector::parse("sqrt2m1"), 2, 1000, 1000000, Sampling::grid(kGridPoints));
  const double ub = c.union_bound.upper.get_d();
  const bool ok = c.empirical.fraction <= ub + kSigmas * c.empirical.sigma && ub <= kUnionCap;
  return {ok, "fraction " + num(c.empirical.fraction) + " (sigma " + num(c.empirical.sigma) + "), union bound " +
                  num(ub, 10) + ", cap " + num(kUnionCap)};
}

Outcome criterion10() {
  Random rng(kSeed + 10);
  int failures = 0;
  for (int i = 0; i < kIdentityCases; ++i) {
    const unsigned ell = static_cast<unsigned>(rng.uniform(1, 3));
    const RealVector x = RealVector::parse(rng.point(ell));
    mpq_class delta;
    do delta = rng.unit_rational(1000);
    while (delta >= mpq_class(1, 2));
    const std::uint64_t N = rng.uniform(1, kIdentityMaxN);
    const std::uint64_t lattice = count_lattice_points(build_lattice(x, N, delta));
    std::uint64_t below = 0;
    if (N > 1) {
      CountQuery q;
      q.x = x;
      q.delta = Real(delta);
      q.N = N - 1;
      below = count_Q(q).count;
    }
    if (lattice != 2 * below + 1) ++failures;
  }
  return {failures == 0, std::to_string(kIdentityCases) + " specs, " + std::to_string(failures) + " mismatches"};
}

// One CLI result file per criterion family, replayed byte for byte.
Outcome criterion11(const std::filesystem::path& dir) {
  const std::vector<std::pair<std::string, dtk::Config>> runs = {
      {"count", {{"x", "sqrt2m1,1/3,1/7+2/9*sqrt(13)"}, {"delta", "3/10"}, {"N", "10000"}}},
      {"nalpha", {{"x", "sqrt2m1"}, {"tau", "3/2"}, {"N", "1000,10000,100000,1000000"}}},
      {"exponent", {{"x", "golden"}, {"H", "100000"}}},
      {"exponent", {{"x", "sqrt2m1,-1+1*sqrt(3)"}, {"H", "1000"}, {"format", "json"}}},
      {"exponent", {{"x", "1/2"}, {"H", "100000"}}},
      {"transference", {{"x", "sqrt2m1,-1+1*sqrt(3)"}, {"H", "100000"}, {"Qmax", "100000"}}},
      {"cover", {{"x", "sqrt2m1"}, {"psi", "q^-9/20"}, {"N", "100,1000,2000"}}},
      {"ubiquity", {{"x", "sqrt2m1"}, {"psi", "q^-1/2"}, {"jhi", "12"}}},
      {"select-k", {{"x", "sqrt2m1"}, {"psi", "q^-9/20"}, {"jhi", "14"}}},
      {"measure", {{"x", "sqrt2m1"}, {"psi", "q^-1/2"}, {"Qmax", "1000000"}}},
      {"phi-contrast", {{"x", "sqrt2m1"}, {"Q0", "1000"}, {"Qmax", "1000000"}}},
      {"measure",
       {{"x", "sqrt2m1"}, {"psi", "q^-1/2"}, {"Q0", "1000"}, {"Qmax", "100000"}, {"sampling", "monte-carlo"},
        {"points", "2000"}, {"seed", "7"}, {"format", "json"}}},
      {"lattice", {{"x", "sqrt2m1,-1+1*sqrt(3)"}, {"N", "2000"}, {"delta", "1/5"}}},
  };
  std::filesystem::create_directories(dir);
  int identical = 0;
  std::string detail;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const dtk::Command* cmd = dtk::find_command(runs[i].first);
    const dtk::Config cfg = dtk::resolve(*cmd, {}, runs[i].second);
    const std::string bytes = dtk::render(cfg, cmd->run(cfg));
    const auto path = dir / ("run_" + std::to_string(i + 1) + "_" + runs[i].first + "." + cfg.at("format"));
    std::ofstream(path, std::ios::binary) << bytes;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const dtk::ReplayOutcome r = dtk::replay_bytes(ss.str());
    if (r.identical) ++identical;
    else detail += "; drift in " + path.filename().string();
  }
  return {identical == static_cast<int>(runs.size()),
          std::to_string(identical) + "/" + std::to_string(runs.size()) + " result files replay identically" + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out_dir = argc > 1 ? argv[1] : "acceptance_runs";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"count lower bound suite", criterion1},
      {"nalpha bound for sqrt2-1, tau = 3/2", criterion2},
      {"exponent estimates", criterion3},
      {"transference suite", criterion4},
      {"covering measure", criterion5},
      {"conditions (R) and (D)", criterion6},
      {"ubiquity pipeline select_k", criterion7},
      {"divergence probe", criterion8},
      {"convergence contrast", criterion9},
      {"lattice count identity", criterion10},
      {"reproducibility", [&] { return criterion11(out_dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("CRITERION %zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
