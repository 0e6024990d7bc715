#include <algorithm>

#include "dioph/errors.hpp"
#include "dioph/exponents.hpp"
#include "dioph/lattice.hpp"
#include "dioph/measure.hpp"
#include "dioph/ubiquity.hpp"
#include "harness.hpp"

namespace dtk {

using namespace dioph;

namespace {

RealVector get_x(const Config& cfg) { return RealVector::parse(text(cfg, "x")); }
ApproxFunction get_psi(const Config& cfg) { return ApproxFunction::parse(text(cfg, "psi")); }

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "; " : "") + v[i];
  return s;
}

// d defaults to dim(x) + extra
unsigned get_d(const Config& cfg, const RealVector& x, unsigned extra) {
  return has(cfg, "d") ? get_uint(cfg, "d") : static_cast<unsigned>(x.dim()) + extra;
}

Sampling get_sampling(const Config& cfg) {
  const std::string& mode = text(cfg, "sampling");
  const std::uint64_t n = get_u64(cfg, "points");
  if (mode == "grid") return Sampling::grid(n);
  if (mode == "monte-carlo") {
    if (!has(cfg, "seed")) fail(ErrorKind::Parse, "monte-carlo sampling requires --seed");
    return Sampling::monte_carlo(n, get_u64(cfg, "seed"));
  }
  fail(ErrorKind::Parse, "--sampling must be grid or monte-carlo, got '" + mode + "'");
}

Result run_count(const Config& cfg) {
  CountQuery q;
  q.x = get_x(cfg);
  q.N = get_u64(cfg, "N");
  q.M = get_u64(cfg, "M");
  if (has(cfg, "delta") == has(cfg, "psi")) fail(ErrorKind::Parse, "give exactly one of --delta and --psi");
  if (has(cfg, "delta")) q.delta = Real(get_rational(cfg, "delta"));
  else q.psi = get_psi(cfg);
  if (has(cfg, "gamma")) q.gamma = RealVector::parse(text(cfg, "gamma"));
  const CountReport r = count_Q(q, get_budget(cfg));
  Result out;
  out.table.columns = {"N", "M", "count", "threshold", "bound", "pass"};
  out.table.rows.push_back({std::to_string(r.N), std::to_string(r.M), std::to_string(r.count), r.threshold.to_string(),
                            r.bound_applicable ? fmt(r.lemma_lower_bound) : "NA",
                            r.bound_applicable ? fmt(r.bound_satisfied) : "NA"});
  out.summary["verdict"] = r.bound_applicable ? (r.bound_satisfied ? "pass" : "fail") : "not-applicable";
  return out;
}

Result run_series(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const ApproxFunction psi = get_psi(cfg);
  const unsigned k = get_uint(cfg, "k");
  const auto pts = partial_series(x, psi, k, get_u64(cfg, "Qmax"), get_budget(cfg));
  Result out;
  out.table.columns = {"Q", "qualifying", "sum"};
  for (const auto& p : pts) out.table.rows.push_back({std::to_string(p.Q), std::to_string(p.qualifying), fmt(p.sum)});
  const unsigned d = get_d(cfg, x, k);
  const DivergenceVerdict v = classify_divergence(psi, d, get_uint(cfg, "M"));
  out.summary["condensed_d"] = std::to_string(d);
  out.summary["divergence"] = verdict_name(v.verdict);
  out.summary["divergence_reason"] = v.reason;
  return out;
}

Aggregation get_aggregation(const Config& cfg) {
  Aggregation a;
  if (has(cfg, "from_block")) {
    a.mode = Aggregation::Mode::FromBlock;
    a.from_block = get_uint(cfg, "from_block");
  } else {
    a.fraction = get_rational(cfg, "fraction").get_d();
  }
  return a;
}

void estimate_summary(Result& out, const ExponentEstimate& e, const std::string& prefix) {
  out.summary[prefix + "value"] = fmt(e.value);
  out.summary[prefix + "window_from"] = std::to_string(e.window_from);
  out.summary[prefix + "effective_height"] = std::to_string(e.effective_height);
  out.summary[prefix + "exact_resonance"] = fmt(e.exact_resonance);
  out.summary[prefix + "boundary_regime"] = fmt(e.boundary_regime);
  out.summary[prefix + "still_increasing"] = fmt(e.still_increasing);
  if (!e.warnings.empty()) out.summary[prefix + "warnings"] = join(e.warnings);
}

Result run_exponent(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const std::uint64_t H = get_u64(cfg, "H");
  const std::string& kind = text(cfg, "kind");
  const Aggregation agg = get_aggregation(cfg);
  const Budget budget = get_budget(cfg);
  ExponentEstimate e;
  if (kind == "tau_D") e = estimate_tau_D(x, H, agg, budget);
  else if (kind == "omega_D") e = estimate_omega_D(x, H, agg, budget);
  else if (kind == "omega_S") e = estimate_omega_S(x, H, agg, budget);
  else fail(ErrorKind::Parse, "--kind must be tau_D, omega_D or omega_S, got '" + kind + "'");
  Result out;
  out.table.columns = {"block", "lo", "hi", "populated", "value", "witness"};
  for (const BlockMax& b : e.blocks)
    out.table.rows.push_back({std::to_string(b.b), std::to_string(b.lo), std::to_string(b.hi), fmt(b.populated),
                              fmt(b.value), join(b.witness)});
  estimate_summary(out, e, "");
  return out;
}

Result run_transference(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const Budget budget = get_budget(cfg);
  const Aggregation agg = get_aggregation(cfg);
  const ExponentEstimate wd = estimate_omega_D(x, get_u64(cfg, "H"), agg, budget);
  const ExponentEstimate ws = estimate_omega_S(x, get_u64(cfg, "Qmax"), agg, budget);
  const unsigned d = static_cast<unsigned>(x.dim());
  const TransferenceCheck t = check_transference(wd.value, ws.value, d, get_rational(cfg, "slack").get_d());
  Result out;
  out.table.columns = {"d", "omega_D", "omega_S", "lower", "upper", "pass"};
  out.table.rows.push_back({std::to_string(d), fmt(wd.value), fmt(ws.value), fmt(t.lower), fmt(t.upper), fmt(t.pass)});
  estimate_summary(out, wd, "omega_D_");
  estimate_summary(out, ws, "omega_S_");
  out.summary["verdict"] = t.pass ? "pass" : "fail";
  out.summary["detail"] = t.detail;
  return out;
}

Result run_vwa(const Config& cfg) {
  const auto qs = vwa_witnesses(get_x(cfg), get_rational(cfg, "epsilon"), get_u64(cfg, "Qmax"), get_budget(cfg));
  Result out;
  out.table.columns = {"q"};
  for (auto q : qs) out.table.rows.push_back({std::to_string(q)});
  out.summary["witnesses"] = std::to_string(qs.size());
  return out;
}

Result run_lattice(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const std::uint64_t N = get_u64(cfg, "N");
  const mpq_class delta = get_rational(cfg, "delta");
  const Budget budget = get_budget(cfg);
  const LatticeSpec spec = build_lattice(x, N, delta, get_uint(cfg, "bits"));
  const std::uint64_t count = count_lattice_points(spec, budget);
  CountQuery q;
  q.x = x;
  q.N = N - 1;
  q.delta = Real(delta);
  const std::uint64_t cq = N > 1 ? count_Q(q, budget).count : 0;
  const auto dual = dual_short_vector(spec, get_rational(cfg, "search_bound").get_d(), budget);
  Result out;
  out.table.columns = {"N", "delta", "t", "R", "det", "lattice_count", "count_Q_below_N", "dual_q", "dual_p",
                       "dual_residual", "dual_image_norm"};
  out.table.rows.push_back({std::to_string(N), fmt(delta), fmt(spec.t), fmt(spec.R), fmt(spec.det),
                            std::to_string(count), std::to_string(cq), dual ? join(dual->q) : "none",
                            dual ? std::to_string(dual->p) : "none", dual ? fmt(dual->residual) : "none",
                            dual ? fmt(dual->sup_norm_image) : "none"});
  out.summary["identity_holds"] = fmt(count == 2 * cq + 1);
  return out;
}

Result run_nalpha(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const mpq_class tau = get_rational(cfg, "tau");
  NalphaOptions opt;
  opt.N_min = get_u64(cfg, "N_min");
  opt.search_bound = get_rational(cfg, "search_bound").get_d();
  const Budget budget = get_budget(cfg);
  Result out;
  out.table.columns = {"N", "delta", "count", "bound", "margin", "verdict", "witness_q", "witness_p", "witness_final"};
  std::size_t passes = 0, fails = 0;
  for (std::uint64_t N : get_u64_list(cfg, "N")) {
    const Real delta = has(cfg, "delta") ? Real(get_rational(cfg, "delta"))
                                         : Real::power(mpz_class(static_cast<unsigned long>(N)), -1 / tau);
    const NalphaCheck c = verify_nalpha_bound(x, tau, N, delta, opt, budget);
    passes += c.verdict == NalphaVerdict::Pass;
    fails += c.verdict == NalphaVerdict::Fail;
    out.table.rows.push_back({std::to_string(N), delta.to_string(), std::to_string(c.count), c.bound.to_string(),
                              fmt(c.margin), nalpha_verdict_name(c.verdict), c.witness ? join(c.witness->q) : "none",
                              c.witness ? std::to_string(c.witness->p) : "none",
                              c.witness ? fmt(c.witness_final_holds) : "NA"});
    if (!c.reason.empty()) out.summary["reason_N" + std::to_string(N)] = c.reason;
  }
  out.summary["verdict"] = fails ? "fail" : (passes == out.table.rows.size() ? "pass" : "inconclusive");
  return out;
}

Result run_cover(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const ApproxFunction psi = get_psi(cfg);
  const Budget budget = get_budget(cfg);
  Result out;
  out.table.columns = {"N", "d", "psi_N", "qualifying", "balls", "measure", "full"};
  bool all_full = true;
  for (std::uint64_t N : get_u64_list(cfg, "N")) {
    const CoverReport r = mink_cover(x, psi, N, budget);
    const bool full = r.measure.lower == 1;
    all_full = all_full && full;
    out.table.rows.push_back({std::to_string(r.N), std::to_string(r.d), fmt(r.psi_N), std::to_string(r.qualifying),
                              std::to_string(r.balls), fmt(r.measure), fmt(full)});
  }
  out.summary["verdict"] = all_full ? "full-cover" : "partial-cover";
  return out;
}

UbiquityOptions get_ubiquity_options(const Config& cfg) {
  UbiquityOptions o;
  o.kappa_floor = get_rational(cfg, "kappa_floor").get_d();
  o.pairwise_family = get_u64(cfg, "pairwise_family");
  return o;
}

std::string verdict_text(const ConditionVerdict& v) {
  std::string s = condition_state_name(v.state);
  if (v.state == ConditionState::HoldsFrom) s += "(" + std::to_string(v.j0) + ")";
  return s;
}

Result run_ubiquity(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const unsigned d = get_d(cfg, x, 1);
  const unsigned k = get_uint(cfg, "k");
  const mpq_class c = has(cfg, "c") ? get_rational(cfg, "c") : mpq_class(2 * k);
  const UbiquityReport r = check_conditions(x, get_psi(cfg), d, k, c, get_uint(cfg, "jlo"), get_uint(cfg, "jhi"),
                                            get_ubiquity_options(cfg), get_budget(cfg));
  Result out;
  out.table.columns = {"k",           "c",         "j",          "block_count", "union_measure", "union_lower",
                       "method",      "R_ratio",   "D_partial",  "D_normalized", "small_count",  "small_mass",
                       "nreq"};
  for (const UbiquityRow& row : r.rows)
    out.table.rows.push_back({std::to_string(r.k), fmt(r.c), std::to_string(row.j), std::to_string(row.block_count),
                              fmt(row.u_measure), fmt(row.u_lower), measure_method_name(row.method), fmt(row.r_ratio),
                              fmt(row.d_partial), fmt(row.d_normalized), std::to_string(row.small_count),
                              fmt(row.small_mass), fmt(row.nreq)});
  out.summary["U"] = verdict_text(r.U);
  out.summary["R"] = verdict_text(r.R);
  out.summary["D"] = verdict_text(r.D);
  out.summary["displacement"] = verdict_text(r.displacement);
  out.summary["kappa_witness"] = fmt(r.kappa_witness);
  out.summary["kappa_floor"] = fmt(r.kappa_floor);
  out.summary["tested_j"] = std::to_string(r.j_lo) + ".." + std::to_string(r.j_hi);
  if (!r.warnings.empty()) out.summary["warnings"] = join(r.warnings);
  return out;
}

Result run_select_k(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const unsigned d = get_d(cfg, x, 1);
  std::vector<unsigned> ks;
  for (auto k : get_u64_list(cfg, "kvalues")) ks.push_back(static_cast<unsigned>(k));
  const SelectKResult r = select_k(x, get_psi(cfg), d, ks, get_uint(cfg, "jlo"), get_uint(cfg, "jhi"),
                                   get_ubiquity_options(cfg), get_budget(cfg));
  Result out;
  out.table.columns = {"k", "c", "U", "kappa_witness", "displacement", "R", "D", "tested_j"};
  for (const UbiquityReport& t : r.tried)
    out.table.rows.push_back({std::to_string(t.k), fmt(t.c), verdict_text(t.U), fmt(t.kappa_witness),
                              verdict_text(t.displacement), verdict_text(t.R), verdict_text(t.D),
                              std::to_string(t.j_lo) + ".." + std::to_string(t.j_hi)});
  out.summary["selected_k"] = r.k ? std::to_string(*r.k) : "none";
  return out;
}

MeasureExperiment get_experiment(const Config& cfg, unsigned default_k) {
  MeasureExperiment e;
  e.x = get_x(cfg);
  e.psi = get_psi(cfg);
  e.k = has(cfg, "k") ? get_uint(cfg, "k") : default_k;
  e.d = get_d(cfg, e.x, e.k);
  e.Q0 = get_u64(cfg, "Q0");
  e.Q_max = get_u64(cfg, "Qmax");
  e.sampling = get_sampling(cfg);
  return e;
}

void point_table(Result& out, const MeasureResult& m) {
  for (unsigned i = 0; i < m.points.k; ++i) out.table.columns.push_back("y" + std::to_string(i + 1));
  out.table.columns.push_back("witness_count");
  out.table.columns.push_back("first_witness_q");
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    std::vector<std::string> row;
    for (unsigned j = 0; j < m.points.k; ++j) row.push_back(m.points.coordinate(i, j));
    row.push_back(std::to_string(m.records[i].witness_count));
    row.push_back(m.records[i].first_witness ? std::to_string(m.records[i].first_witness) : "none");
    out.table.rows.push_back(std::move(row));
  }
  out.summary["fraction"] = fmt(m.fraction);
  out.summary["hits"] = std::to_string(m.hits);
  out.summary["n_points"] = std::to_string(m.n_points);
  out.summary["Q0"] = std::to_string(m.Q0);
  out.summary["Q_max"] = std::to_string(m.Q_max);
  out.summary["sigma"] = fmt(m.sigma);
  out.summary["qualifying"] = std::to_string(m.qualifying);
  out.summary["undecided"] = std::to_string(m.undecided);
}

void sampling_summary(Result& out, const Config& cfg) {
  out.summary["sampling"] = text(cfg, "sampling");
  if (text(cfg, "sampling") == "monte-carlo") {
    out.summary["seed"] = text(cfg, "seed");
    out.summary["generator"] = kSamplerAlgorithm;
  }
}

Result run_measure(const Config& cfg) {
  const MeasureResult m = approximable_fraction(get_experiment(cfg, 1), get_budget(cfg));
  Result out;
  point_table(out, m);
  sampling_summary(out, cfg);
  return out;
}

Result run_phi_contrast(const Config& cfg) {
  const RealVector x = get_x(cfg);
  const PhiContrast c = phi_contrast(x, get_d(cfg, x, 1), get_u64(cfg, "Q0"), get_u64(cfg, "Qmax"),
                                     get_sampling(cfg), get_budget(cfg));
  Result out;
  point_table(out, c.empirical);
  sampling_summary(out, cfg);
  out.summary["union_bound"] = fmt(c.union_bound);
  out.summary["union_bound_approx"] = fmt(c.union_bound.approx());
  out.summary["within_3sigma"] = fmt(c.within);
  return out;
}

Result run_subspace(const Config& cfg) {
  const SubspaceResult s = subspace_fraction(get_experiment(cfg, 2), get_budget(cfg));
  Result out;
  point_table(out, s.measure);
  sampling_summary(out, cfg);
  std::string series;
  for (std::size_t i = 0; i < s.series.size(); ++i)
    series += (i ? ";" : "") + std::to_string(s.series[i].Q) + ":" + fmt(s.series[i].sum.approx());
  out.summary["series"] = series;
  if (!s.series.empty()) out.summary["series_final"] = fmt(s.series.back().sum);
  return out;
}

const std::vector<Param> kSamplingParams = {
    {"Q0", "0", "q floor: witnesses q in (Q0, Qmax]"},
    {"Qmax", "", "largest q", true},
    {"sampling", "grid", "grid or monte-carlo"},
    {"points", "10000", "number of sample points (grid: a perfect k-th power)"},
    {"seed", "", "generator seed (required for monte-carlo)"},
};

std::vector<Param> with_sampling(std::vector<Param> p) {
  p.insert(p.end(), kSamplingParams.begin(), kSamplingParams.end());
  return p;
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"count", "count q in (M, N] with ‖q·x + γ‖ < δ (or ψ(N))",
       {{"x", "", "point, comma separated", true},
        {"delta", "", "rational threshold"},
        {"psi", "", "approximation function literal"},
        {"N", "", "upper end", true},
        {"M", "0", "lower end (exclusive)"},
        {"gamma", "", "inhomogeneous shift"}},
       run_count},
      {"series", "partial sums of ψ(q)^k over qualifying q",
       {{"x", "", "point", true},
        {"psi", "", "approximation function", true},
        {"k", "1", "exponent of ψ"},
        {"Qmax", "", "largest q", true},
        {"d", "", "dimension for the condensed series (default dim(x)+k)"},
        {"M", "30", "condensed terms 2^m, m <= M"}},
       run_series},
      {"exponent", "dyadic block estimate of tau_D, omega_D or omega_S",
       {{"x", "", "point", true},
        {"H", "", "height (or Q_max for omega_S)", true},
        {"kind", "tau_D", "tau_D, omega_D or omega_S"},
        {"fraction", "1/2", "top fraction of blocks aggregated"},
        {"from_block", "", "aggregate blocks from this index instead"}},
       run_exponent},
      {"transference", "check ω_D/(d² + (d−1)ω_D) <= ω_S <= ω_D on estimates",
       {{"x", "", "point", true},
        {"H", "", "height for omega_D", true},
        {"Qmax", "", "Q_max for omega_S", true},
        {"slack", "0.05", "absolute slack"},
        {"fraction", "1/2", "top fraction of blocks aggregated"},
        {"from_block", "", "aggregate blocks from this index instead"}},
       run_transference},
      {"vwa", "q <= Qmax with ‖q·x‖ < q^(−1/d − ε)",
       {{"x", "", "point", true}, {"epsilon", "", "ε > 0", true}, {"Qmax", "", "largest q", true}},
       run_vwa},
      {"lattice", "lattice data, point count and a short dual vector",
       {{"x", "", "point", true},
        {"N", "", "N", true},
        {"delta", "", "δ in (0, 1)", true},
        {"bits", "128", "working precision"},
        {"search_bound", "8", "dual search constant"}},
       run_lattice},
      {"nalpha", "count <= 4^(ℓ+1)·N·δ^ℓ for δ >= N^(−1/τ)",
       {{"x", "", "point", true},
        {"tau", "", "τ", true},
        {"N", "", "N, or a comma separated list", true},
        {"delta", "", "rational δ (default N^(−1/τ))"},
        {"N_min", "1000", "failures below this are inconclusive"},
        {"search_bound", "8", "dual search constant"}},
       run_nalpha},
      {"cover", "measure of the covering by balls around p/q",
       {{"x", "", "point", true},
        {"psi", "", "approximation function", true},
        {"N", "", "N, or a comma separated list", true}},
       run_cover},
      {"ubiquity", "conditions (U), (R), (D) over a j-range",
       {{"x", "", "point", true},
        {"psi", "", "approximation function", true},
        {"d", "", "dimension (default dim(x)+1)"},
        {"k", "2", "base k"},
        {"c", "", "constant c (default 2k)"},
        {"jlo", "1", "first j"},
        {"jhi", "", "last j", true},
        {"kappa_floor", "0.05", "certified floor for (U)"},
        {"pairwise_family", "4000", "subfamily size for the pairwise bound"}},
       run_ubiquity},
      {"select-k", "smallest k with (U) at c = 2k",
       {{"x", "", "point", true},
        {"psi", "", "approximation function", true},
        {"d", "", "dimension (default dim(x)+1)"},
        {"kvalues", "2,3,4,8,16,32,64", "candidate k in search order"},
        {"jlo", "1", "first j"},
        {"jhi", "", "last j", true},
        {"kappa_floor", "0.05", "certified floor for (U)"},
        {"pairwise_family", "4000", "subfamily size for the pairwise bound"}},
       run_select_k},
      {"measure", "fraction of y in [0,1]^k with ‖q·(x, y)‖ < ψ(q) for some q in (Q0, Qmax]",
       with_sampling({{"x", "", "point", true},
                      {"psi", "", "approximation function", true},
                      {"k", "1", "fiber dimension"},
                      {"d", "", "dimension (default dim(x)+k)"}}),
       run_measure},
      {"phi-contrast", "empirical φ-witness fraction against the union bound",
       with_sampling({{"x", "", "point", true}, {"d", "", "dimension (default dim(x)+1)"}}), run_phi_contrast},
      {"subspace", "measure experiment on [0,1]^k, k >= 2, with the companion series",
       with_sampling({{"x", "", "point", true},
                      {"psi", "", "approximation function", true},
                      {"k", "2", "fiber dimension"},
                      {"d", "", "dimension (default dim(x)+k)"}}),
       run_subspace},
  };
  return cmds;
}

}  // namespace dtk
