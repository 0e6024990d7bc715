#include "dioph/real.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dioph {

namespace {

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view s) : s_(s) {}

  Surd parse_sum(bool& saw_root, bool& saw_decimal) {
    Surd acc;
    skip();
    bool first = true;
    while (pos_ < s_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        error("expected '+' or '-'");
      }
      acc += parse_term(saw_root, saw_decimal) * mpq_class(sign);
      first = false;
      skip();
    }
    if (first) error("empty literal");
    return acc;
  }

  mpq_class parse_number(bool& saw_decimal) {
    skip();
    std::size_t start = pos_;
    std::string mant;
    long frac_digits = 0;
    bool dot = false, digits = false;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      if (s_[pos_] == '.') {
        if (dot) error("repeated '.'");
        dot = true;
      } else {
        mant.push_back(s_[pos_]);
        digits = true;
        if (dot) ++frac_digits;
      }
      ++pos_;
    }
    if (!digits) {
      pos_ = start;
      error("expected a number");
    }
    long exp10 = 0;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      int es = 1;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) es = s_[pos_++] == '-' ? -1 : 1;
      std::string ed;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ed.push_back(s_[pos_++]);
      if (ed.empty() || ed.size() > 6) error("bad exponent");
      exp10 = es * std::stol(ed);
      dot = true;
    }
    if (dot) saw_decimal = true;
    mpq_class v{mpz_class(mant, 10)};
    long shift = exp10 - frac_digits;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    if (shift >= 0) v *= p; else v /= p;
    skip();
    if (!dot && pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      skip();
      bool d2 = false;
      mpq_class den = parse_number(d2);
      if (d2 || den.get_den() != 1) error("denominator must be an integer");
      if (den == 0) error("zero denominator");
      v /= den;
    }
    v.canonicalize();
    return v;
  }

  bool done() {
    skip();
    return pos_ >= s_.size();
  }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, "real literal '" + std::string(s_) + "': " + msg + " at offset " +
                               std::to_string(pos_) +
                               " (grammar: p/q | a+b*sqrt(c) | decimal | sqrt2m1 | golden | liouville10(n))");
  }

 private:
  Surd parse_term(bool& saw_root, bool& saw_decimal) {
    skip();
    if (match("sqrt(")) return parse_root(1, saw_root, saw_decimal);
    mpq_class v = parse_number(saw_decimal);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      skip();
      if (!match("sqrt(")) error("expected sqrt( after '*'");
      return parse_root(v, saw_root, saw_decimal);
    }
    return Surd(v);
  }

  Surd parse_root(const mpq_class& coeff, bool& saw_root, bool& saw_decimal) {
    mpq_class c = parse_number(saw_decimal);
    skip();
    if (pos_ >= s_.size() || s_[pos_] != ')') error("expected ')'");
    ++pos_;
    saw_root = true;
    return Surd::root(coeff, c);
  }

  bool match(std::string_view word) {
    if (s_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }
  char peek() const { return s_[pos_]; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Surd liouville10(unsigned long n) {
  mpq_class acc = 0;
  mpz_class fact = 1, p;
  for (unsigned long j = 1; j <= n; ++j) {
    fact *= j;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, fact.get_ui());
    acc += mpq_class(1, p);
  }
  return Surd(acc);
}

}  // namespace

double CertifiedValue::approx() const {
  if (is_exact()) return lower.get_d();
  return (lower.get_d() + upper.get_d()) / 2;
}

std::string CertifiedValue::to_string() const {
  if (is_exact()) return lower.get_str();
  return "[" + lower.get_str() + "," + upper.get_str() + "]";
}

CertifiedValue certify(const Surd& v, unsigned bits) {
  CertifiedValue out;
  out.precision_bits = bits;
  if (v.is_rational()) {
    out.lower = out.upper = v.rational_part();
    return out;
  }
  // dyadic floor/ceil one bit finer than requested: nested under refinement
  const unsigned b = bits + 1;
  mpz_class two_b = 1;
  mpz_mul_2exp(two_b.get_mpz_t(), two_b.get_mpz_t(), b);
  Surd scaled = v * mpq_class(two_b);
  PrecisionPolicy policy;
  policy.cap_bits = std::max(policy.cap_bits, 4 * b);
  mpz_class f = scaled.floor(policy);
  out.lower = mpq_class(f, two_b);
  out.upper = mpq_class(f + 1, two_b);
  out.lower.canonicalize();
  out.upper.canonicalize();
  return out;
}

RealExpr RealExpr::from_rational(const mpq_class& v) {
  RealExpr e;
  e.kind_ = Kind::Rational;
  e.literal_ = v.get_str();
  e.value_ = Surd(v);
  return e;
}

RealExpr RealExpr::parse(std::string_view literal) {
  literal = trim(literal);
  RealExpr e;
  e.literal_ = std::string(literal);
  if (literal == "sqrt2m1") {
    e.kind_ = Kind::Named;
    e.value_ = Surd(-1) + Surd::root(1, 2);
    return e;
  }
  if (literal == "golden") {
    e.kind_ = Kind::Named;
    e.value_ = Surd(mpq_class(-1, 2)) + Surd::root(mpq_class(1, 2), 5);
    return e;
  }
  if (literal.substr(0, 12) == "liouville10(" && literal.back() == ')') {
    std::string inner(literal.substr(12, literal.size() - 13));
    if (inner.empty() || inner.find_first_not_of("0123456789") != std::string::npos)
      LiteralParser(literal).error("liouville10 expects a nonnegative integer");
    unsigned long n = std::stoul(inner);
    if (n > 8) LiteralParser(literal).error("liouville10(n) supports n <= 8");
    e.kind_ = Kind::Named;
    e.value_ = liouville10(n);
    return e;
  }
  LiteralParser p(literal);
  bool saw_root = false, saw_decimal = false;
  e.value_ = p.parse_sum(saw_root, saw_decimal);
  if (e.value_.terms().size() > 1) p.error("at most one square root is allowed");
  if (!e.value_.is_rational()) e.kind_ = Kind::Quadratic;
  else e.kind_ = saw_decimal ? Kind::Decimal : Kind::Rational;
  return e;
}

RealVector::RealVector(std::vector<RealExpr> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) fail(ErrorKind::InvalidInput, "a real vector needs at least one coordinate");
}

RealVector RealVector::parse(std::string_view literal) {
  literal = trim(literal);
  if (literal.size() >= 2 && literal.front() == '(' && literal.back() == ')') {
    // strip only if the parentheses enclose the whole literal
    int depth = 0;
    bool whole = true;
    for (std::size_t i = 0; i < literal.size(); ++i) {
      if (literal[i] == '(') ++depth;
      if (literal[i] == ')') --depth;
      if (depth == 0 && i + 1 < literal.size()) whole = false;
    }
    if (whole) literal = literal.substr(1, literal.size() - 2);
  }
  std::vector<RealExpr> coords;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= literal.size(); ++i) {
    if (i == literal.size() || (literal[i] == ',' && depth == 0)) {
      coords.push_back(RealExpr::parse(literal.substr(start, i - start)));
      start = i + 1;
    } else if (literal[i] == '(') {
      ++depth;
    } else if (literal[i] == ')') {
      --depth;
    }
  }
  return RealVector(std::move(coords));
}

std::string RealVector::literal() const {
  std::string out;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ",";
    out += coords_[i].literal();
  }
  return out;
}

RealVector RealVector::append(const RealExpr& y) const {
  std::vector<RealExpr> c = coords_;
  c.push_back(y);
  return RealVector(std::move(c));
}

bool RealVector::all_rational() const {
  for (const auto& c : coords_)
    if (!c.value().is_rational()) return false;
  return true;
}

CertifiedValue nearest_int_dist(const Surd& t, unsigned bits) {
  return certify(nearest_int_distance(t), bits);
}

CertifiedValue nearest_int_dist(const RealExpr& t, unsigned bits) { return nearest_int_dist(t.value(), bits); }

Surd sup_norm_dist_exact(const RealVector& v, const mpz_class& q, const RealVector* gamma,
                         const PrecisionPolicy& policy) {
  Surd best;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    Surd z = v[i].value() * mpq_class(q);
    if (gamma) z += (*gamma)[i].value();
    Surd d = nearest_int_distance(z, policy);
    if (i == 0 || compare(d, best, policy) > 0) best = d;
  }
  return best;
}

CertifiedValue sup_norm_dist(const RealVector& v, std::uint64_t q, unsigned bits) {
  if (q == 0) fail(ErrorKind::InvalidInput, "q must be positive");
  mpz_class qq;
  mpz_import(qq.get_mpz_t(), 1, 1, sizeof(q), 0, 0, &q);
  return certify(sup_norm_dist_exact(v, qq), bits);
}

}  // namespace dioph
