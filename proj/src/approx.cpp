#include "dioph/approx.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dioph {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void grammar_error(std::string_view literal, const std::string& msg) {
  fail(ErrorKind::Parse, "approximating function '" + std::string(literal) + "': " + msg +
                             " (grammar: q^-a | q^-a*log^-b | const:c | phi:d=n | max(A,B) | table:<path>)");
}

mpq_class parse_rational(std::string_view text, std::string_view literal) {
  text = trim(text);
  if (!text.empty() && text.front() == '(' && text.back() == ')') text = text.substr(1, text.size() - 2);
  try {
    RealExpr e = RealExpr::parse(text);
    if (!e.value().is_rational()) grammar_error(literal, "exponent must be rational");
    return e.value().rational_part();
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::Parse) grammar_error(literal, "bad number '" + std::string(text) + "'");
    throw;
  }
}

Interval log_interval(const mpz_class& q, mpfr_prec_t prec) { return log(Interval::point(mpq_class(q), prec)); }

CertifiedValue from_interval(const Interval& iv) {
  CertifiedValue c;
  c.lower = iv.lower().to_rational();
  c.upper = iv.upper().to_rational();
  const double w = iv.width();
  c.precision_bits = w <= 0 ? iv.precision() : static_cast<unsigned>(std::max(1.0, std::floor(-std::log2(w))));
  return c;
}

}  // namespace

mpz_class ipow(unsigned long k, unsigned long j) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), k, j);
  return out;
}

ApproxFunction ApproxFunction::power(const mpq_class& a) {
  if (a <= 0) fail(ErrorKind::InvalidInput, "power preset needs a positive exponent");
  ApproxFunction f;
  f.kind_ = Kind::Power;
  f.a_ = a;
  f.literal_ = "q^-" + a.get_str();
  return f;
}

ApproxFunction ApproxFunction::power_log(const mpq_class& a, const mpq_class& b) {
  if (a <= 0) fail(ErrorKind::InvalidInput, "power-log preset needs a positive power exponent");
  // d/dq of -a log q - b log log q is negative for q >= 2 iff a·log 2 + b >= 0
  Interval test = Interval::point(a, 128) * log_interval(2, 128) + Interval::point(b, 128);
  if (test.certainly_negative())
    fail(ErrorKind::InvalidInput, "power-log preset is not nonincreasing from q = 2");
  ApproxFunction f;
  f.kind_ = Kind::PowerLog;
  f.a_ = a;
  f.b_ = b;
  f.literal_ = "q^-" + a.get_str() + "*log^" + mpq_class(-b).get_str();
  return f;
}

ApproxFunction ApproxFunction::constant(const mpq_class& c) {
  if (c < 0) fail(ErrorKind::InvalidInput, "constant preset must be nonnegative");
  ApproxFunction f;
  f.kind_ = Kind::Constant;
  f.a_ = c;
  f.literal_ = "const:" + c.get_str();
  return f;
}

ApproxFunction ApproxFunction::phi(unsigned d) {
  if (d == 0) fail(ErrorKind::InvalidInput, "phi preset needs d >= 1");
  ApproxFunction f;
  f.kind_ = Kind::Phi;
  f.d_ = d;
  f.literal_ = "phi:d=" + std::to_string(d);
  return f;
}

ApproxFunction ApproxFunction::pointwise_max(const ApproxFunction& f, const ApproxFunction& g) {
  ApproxFunction m;
  m.kind_ = Kind::Max;
  m.f_ = std::make_shared<const ApproxFunction>(f);
  m.g_ = std::make_shared<const ApproxFunction>(g);
  m.literal_ = "max(" + f.literal_ + "," + g.literal_ + ")";
  return m;
}

ApproxFunction ApproxFunction::unchecked_table(Table entries) {
  if (entries.empty()) fail(ErrorKind::InvalidInput, "table preset needs at least one entry");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first == 0) fail(ErrorKind::InvalidInput, "table keys must be positive");
    if (i > 0 && entries[i].first <= entries[i - 1].first)
      fail(ErrorKind::InvalidInput, "table keys must be strictly increasing");
    if (entries[i].second < 0) fail(ErrorKind::InvalidInput, "table values must be nonnegative");
  }
  ApproxFunction f;
  f.kind_ = Kind::Table;
  std::ostringstream os;
  os << "table[";
  for (std::size_t i = 0; i < entries.size(); ++i) os << (i ? ";" : "") << entries[i].first << ":" << entries[i].second.get_str();
  os << "]";
  f.literal_ = os.str();
  f.table_ = std::make_shared<const Table>(std::move(entries));
  return f;
}

ApproxFunction ApproxFunction::table(Table entries) {
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].second > entries[i - 1].second)
      fail(ErrorKind::InvalidInput, "table values must be nonincreasing (q = " + std::to_string(entries[i].first) + ")");
  return unchecked_table(std::move(entries));
}

ApproxFunction ApproxFunction::parse(std::string_view literal) {
  const std::string_view full = literal;
  literal = trim(literal);
  if (literal.rfind("const:", 0) == 0) return constant(parse_rational(literal.substr(6), full));
  if (literal.rfind("phi:d=", 0) == 0) {
    std::string digits(trim(literal.substr(6)));
    if (digits.empty() || digits.size() > 4 || digits.find_first_not_of("0123456789") != std::string::npos)
      grammar_error(full, "phi needs a positive integer d");
    return phi(static_cast<unsigned>(std::stoul(digits)));
  }
  if (literal.rfind("max(", 0) == 0 && literal.back() == ')') {
    std::string_view inner = literal.substr(4, literal.size() - 5);
    int depth = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == '(') ++depth;
      else if (inner[i] == ')') --depth;
      else if (inner[i] == ',' && depth == 0)
        return pointwise_max(parse(inner.substr(0, i)), parse(inner.substr(i + 1)));
    }
    grammar_error(full, "max needs two arguments");
  }
  if (literal.rfind("table:", 0) == 0) {
    std::string path(trim(literal.substr(6)));
    std::ifstream in(path);
    if (!in) grammar_error(full, "cannot read table file '" + path + "'");
    Table entries;
    std::string line;
    while (std::getline(in, line)) {
      std::string_view l = trim(line);
      if (l.empty() || l.front() == '#') continue;
      auto comma = l.find(',');
      if (comma == std::string_view::npos) grammar_error(full, "table rows are 'q,value'");
      std::string key(trim(l.substr(0, comma)));
      if (key.find_first_not_of("0123456789") != std::string::npos) {
        if (entries.empty()) continue;  // header row
        grammar_error(full, "table key '" + key + "' is not an integer");
      }
      entries.push_back({std::stoull(key), parse_rational(l.substr(comma + 1), full)});
    }
    ApproxFunction f = table(std::move(entries));
    f.literal_ = "table:" + path;
    return f;
  }
  if (literal.rfind("q^", 0) == 0) {
    std::string_view rest = literal.substr(2);
    std::string_view power_part = rest, log_part;
    auto star = rest.find("*log^");
    if (star != std::string_view::npos) {
      power_part = rest.substr(0, star);
      log_part = rest.substr(star + 5);
    }
    mpq_class e = parse_rational(power_part, full);
    if (e >= 0) grammar_error(full, "power exponent must be negative");
    if (star == std::string_view::npos) return power(-e);
    return power_log(-e, -parse_rational(log_part, full));
  }
  grammar_error(full, "unrecognized form");
}

Real ApproxFunction::value(const mpz_class& q) const {
  if (q < 1) fail(ErrorKind::InvalidInput, "ψ is defined for q >= 1");
  switch (kind_) {
    case Kind::Power:
      return Real::power(q, -a_);
    case Kind::PowerLog: {
      if (q < 2) fail(ErrorKind::Domain, "log kinds are defined for q >= 2");
      if (b_ == 0) return Real::power(q, -a_);
      const mpq_class a = a_, b = b_;
      const mpz_class qq = q;
      return Real::transcendental(literal_ + " at q=" + q.get_str(), [a, b, qq](mpfr_prec_t p) {
        Interval Q = Interval::point(mpq_class(qq), p);
        return pow_q(Q, -a) * pow_q(log(Q), -b);
      });
    }
    case Kind::Constant:
      return Real(a_);
    case Kind::Phi: {
      const mpz_class qq = q < 2 ? mpz_class(2) : q;
      const unsigned d = d_;
      return Real::transcendental(literal_ + " at q=" + qq.get_str(), [qq, d](mpfr_prec_t p) {
        Interval Q = Interval::point(mpq_class(qq), p);
        Interval L = log(Q);
        return pow_q(Q * L * L, mpq_class(-1, static_cast<long>(d)));
      });
    }
    case Kind::Max:
      return Real::max(f_->value(q), g_->value(q));
    case Kind::Table: {
      const Table& t = *table_;
      if (q > mpz_class(static_cast<unsigned long>(t.back().first))) return Real(0);
      const unsigned long qq = q.get_ui();
      auto it = std::upper_bound(t.begin(), t.end(), qq,
                                 [](unsigned long v, const std::pair<std::uint64_t, mpq_class>& e) { return v < e.first; });
      if (it == t.begin()) return Real(t.front().second);
      return Real(std::prev(it)->second);
    }
  }
  return Real(0);
}

double ApproxFunction::approx(std::uint64_t q) const { return value(q).approx(); }

CertifiedValue certify(const Real& v, unsigned bits) {
  CertifiedValue out;
  out.precision_bits = bits;
  if (v.is_rational()) {
    out.lower = out.upper = v.rational();
    return out;
  }
  const unsigned b = bits + 2;
  for (unsigned prec = bits + 64; prec <= 16 * (bits + 64); prec *= 2) {
    Interval e = v.enclosure(prec);
    if (e.width() > std::ldexp(1.0, -static_cast<int>(bits + 1))) continue;
    BigFloat s(prec + b);
    mpz_class lo, hi, two_b = 1;
    mpz_mul_2exp(two_b.get_mpz_t(), two_b.get_mpz_t(), b);
    mpfr_mul_2ui(s.get(), e.lower().get(), b, MPFR_RNDD);
    mpfr_get_z(lo.get_mpz_t(), s.get(), MPFR_RNDD);
    mpfr_mul_2ui(s.get(), e.upper().get(), b, MPFR_RNDU);
    mpfr_get_z(hi.get_mpz_t(), s.get(), MPFR_RNDU);
    out.lower = mpq_class(lo, two_b);
    out.upper = mpq_class(hi, two_b);
    out.lower.canonicalize();
    out.upper.canonicalize();
    return out;
  }
  fail(ErrorKind::PrecisionExhausted, "cannot certify " + v.to_string() + " to " + std::to_string(bits) + " bits");
}

CertifiedValue eval_psi(const ApproxFunction& psi, std::uint64_t q, unsigned bits) {
  return certify(psi.value(q), bits);
}

CertifiedValue psi_x(const ApproxFunction& psi, const RealVector& x, std::uint64_t q, unsigned bits) {
  Real t = psi.value(q);
  Surd dist = sup_norm_dist_exact(x, mpz_class(static_cast<unsigned long>(q)));
  if (less_than(dist, t)) return certify(t, bits);
  CertifiedValue zero;
  zero.precision_bits = bits;
  return zero;
}

const char* verdict_name(DivergenceVerdict::Verdict v) {
  switch (v) {
    case DivergenceVerdict::Verdict::Diverges: return "diverges";
    case DivergenceVerdict::Verdict::Converges: return "converges";
    case DivergenceVerdict::Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

struct Condensed {
  std::vector<std::pair<unsigned, CertifiedValue>> sums;
  std::vector<CertifiedValue> terms;
};

Condensed condense(const ApproxFunction& psi, unsigned d, unsigned k, unsigned M) {
  Condensed c;
  constexpr mpfr_prec_t kPrec = 256;
  bool exact = true;
  mpq_class exact_sum = 0;
  Interval sum = Interval::point(0L, kPrec);
  for (unsigned m = 1; m <= M; ++m) {
    const mpz_class q = ipow(k, m);
    Real term = Real(mpq_class(q)) * psi.value(q).pow(static_cast<long>(d));
    if (exact && term.is_rational()) {
      exact_sum += term.rational();
      c.terms.push_back(CertifiedValue{term.rational(), term.rational(), kPrec});
      c.sums.push_back({m, CertifiedValue{exact_sum, exact_sum, kPrec}});
      continue;
    }
    if (exact) {
      sum = Interval::point(exact_sum, kPrec);
      exact = false;
    }
    Interval t = term.is_rational() ? Interval::point(term.rational(), kPrec) : term.enclosure(kPrec);
    sum = sum + t;
    c.terms.push_back(from_interval(t));
    c.sums.push_back({m, from_interval(sum)});
  }
  return c;
}

}  // namespace

std::vector<std::pair<unsigned, CertifiedValue>> condensed_partial_sums(const ApproxFunction& psi, unsigned d,
                                                                        unsigned k, unsigned M) {
  return condense(psi, d, k, M).sums;
}

DivergenceVerdict classify_terms(const std::vector<std::pair<unsigned, CertifiedValue>>& partial_sums,
                                 const std::vector<CertifiedValue>& terms, const DivergenceRule& rule) {
  DivergenceVerdict v;
  v.partial_sums = partial_sums;
  const std::size_t n = terms.size();
  const std::size_t w = rule.window;
  if (n < w + 1) {
    v.reason = "fewer than window+1 terms";
    return v;
  }
  v.growth_slope = (partial_sums[n - 1].second.approx() - partial_sums[n - 1 - w].second.approx()) / static_cast<double>(w);
  const CertifiedValue& last = terms[n - 1];
  if (last.upper == 0) {
    v.verdict = DivergenceVerdict::Verdict::Converges;
    v.reason = "zero tail";
    return v;
  }
  bool any_zero = false;
  for (std::size_t i = n - 1 - w; i < n; ++i) any_zero = any_zero || terms[i].upper == 0;
  if (any_zero) {
    v.reason = "zero terms inside window";
    return v;
  }
  const double M = static_cast<double>(partial_sums[n - 1].first);
  const double M0 = static_cast<double>(partial_sums[n - 1 - w].first);
  v.decay_exponent = -(std::log(terms[n - 1].approx()) - std::log(terms[n - 1 - w].approx())) / (std::log(M) - std::log(M0));

  bool all_small = true, all_below_one = true, nonincreasing = true, floor_ok = true;
  bool exact = true;
  for (std::size_t i = n - 1 - w; i < n; ++i) exact = exact && terms[i].is_exact();
  mpq_class prev_ratio_q;
  double prev_ratio = 0;
  for (std::size_t i = n - w; i < n; ++i) {
    if (terms[i].approx() < rule.increment_floor) floor_ok = false;
    if (exact) {
      mpq_class r = terms[i].lower / terms[i - 1].lower;
      if (r.get_d() > rule.ratio_max) all_small = false;
      if (r >= 1) all_below_one = false;
      if (i > n - w && r > prev_ratio_q) nonincreasing = false;
      prev_ratio_q = r;
    } else {
      double r = terms[i].approx() / terms[i - 1].approx();
      if (r > rule.ratio_max) all_small = false;
      if (r >= 1) all_below_one = false;
      if (i > n - w && r > prev_ratio * (1 + 1e-12)) nonincreasing = false;
      prev_ratio = r;
    }
  }
  if (all_small) {
    v.verdict = DivergenceVerdict::Verdict::Converges;
    v.reason = "term ratios at most " + std::to_string(rule.ratio_max);
  } else if (all_below_one && nonincreasing) {
    v.verdict = DivergenceVerdict::Verdict::Converges;
    v.reason = "stationary term ratio below 1";
  } else if (v.decay_exponent >= rule.decay_converges) {
    v.verdict = DivergenceVerdict::Verdict::Converges;
    v.reason = "polynomial decay of terms";
  } else if (floor_ok && v.decay_exponent <= rule.decay_diverges + 1e-9) {
    v.verdict = DivergenceVerdict::Verdict::Diverges;
    v.reason = "increments above floor without summable decay";
  } else {
    v.reason = "no rule applies";
  }
  return v;
}

DivergenceVerdict classify_divergence(const ApproxFunction& psi, unsigned d, unsigned M_max,
                                      const DivergenceRule& rule) {
  if (M_max < 8) fail(ErrorKind::InvalidInput, "classify_divergence needs M_max >= 8");
  if (d == 0) fail(ErrorKind::InvalidInput, "d must be positive");
  Condensed c = condense(psi, d, 2, M_max);
  return classify_terms(c.sums, c.terms, rule);
}

RegularityResult check_u_regular(const ApproxFunction& psi, unsigned k, unsigned j_lo, unsigned j_hi) {
  if (k < 2) fail(ErrorKind::InvalidInput, "k must be at least 2");
  if (j_lo > j_hi) fail(ErrorKind::InvalidInput, "empty j range");
  RegularityResult r;
  for (unsigned j = j_lo; j <= j_hi; ++j) {
    Real a = psi.value(ipow(k, j));
    Real b = psi.value(ipow(k, j + 1));
    if (a.is_rational() && a.rational() == 0) {
      if (!(b.is_rational() && b.rational() == 0)) r.holds = false;
      continue;
    }
    // Ψ(k^{j+1})/Ψ(k^j) = ψ(k^{j+1})/(k·ψ(k^j))
    Real ratio = b * (a * Real(static_cast<long>(k))).pow(-1);
    if (compare(b, a) > 0) r.holds = false;
    r.ratios.push_back({j, ratio});
    r.witnessed_kappa = r.kappa_defined ? Real::max(r.witnessed_kappa, ratio) : ratio;
    r.kappa_defined = true;
  }
  return r;
}

}  // namespace dioph
