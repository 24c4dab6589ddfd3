#include "selinf/real.hpp"

#include <ostream>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "selinf/error.hpp"

namespace selinf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MissingTreatment: return "MissingTreatment";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::UnknownInput: return "UnknownInput";
    case ErrorCode::SameInput: return "SameInput";
    case ErrorCode::UnrankedValue: return "UnrankedValue";
    case ErrorCode::ValueNotInPartition: return "ValueNotInPartition";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::GroundAxiomViolation: return "GroundAxiomViolation";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::HiddenSpaceTooLarge: return "HiddenSpaceTooLarge";
    case ErrorCode::NumericalInstability: return "NumericalInstability";
    case ErrorCode::MarginalSelectivityViolated: return "MarginalSelectivityViolated";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::NotExact: return "NotExact";
  }
  return "Unknown";
}

Real Real::ratio(long num, long den) {
  if (den == 0) throw Error(ErrorCode::InvalidInput, "zero denominator");
  return Real(mpq_class(num, den));
}

const mpq_class& Real::rational() const {
  if (!exact()) throw Error(ErrorCode::NotExact, "value " + str() + " is not an exact rational");
  return std::get<mpq_class>(value_);
}

double Real::to_double() const {
  if (exact()) return std::get<mpq_class>(value_).get_d();
  return std::get<double>(value_);
}

bool Real::is_zero() const { return sign() == 0; }

int Real::sign() const {
  if (exact()) return sgn(std::get<mpq_class>(value_));
  const double d = std::get<double>(value_);
  return (d > 0) - (d < 0);
}

std::string Real::str() const {
  if (exact()) return std::get<mpq_class>(value_).get_str();
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), std::get<double>(value_));
  return std::string(buf, ptr);
}

namespace {

template <class Op>
void combine(std::variant<mpq_class, double>& lhs, const Real& rhs, Op op) {
  if (std::holds_alternative<mpq_class>(lhs) && rhs.exact()) {
    auto& q = std::get<mpq_class>(lhs);
    mpq_class result;
    op(result, q, rhs.rational());
    q = std::move(result);
  } else {
    const double l = std::holds_alternative<mpq_class>(lhs) ? std::get<mpq_class>(lhs).get_d()
                                                            : std::get<double>(lhs);
    double result = 0.0;
    op(result, l, rhs.to_double());
    lhs = result;
  }
}

}  // namespace

Real& Real::operator+=(const Real& o) {
  combine(value_, o, [](auto& r, const auto& a, const auto& b) { r = a + b; });
  return *this;
}

Real& Real::operator-=(const Real& o) {
  combine(value_, o, [](auto& r, const auto& a, const auto& b) { r = a - b; });
  return *this;
}

Real& Real::operator*=(const Real& o) {
  combine(value_, o, [](auto& r, const auto& a, const auto& b) { r = a * b; });
  return *this;
}

Real& Real::operator/=(const Real& o) {
  if (o.exact() && exact() && o.is_zero()) throw Error(ErrorCode::InvalidInput, "division by zero");
  combine(value_, o, [](auto& r, const auto& a, const auto& b) { r = a / b; });
  return *this;
}

Real operator-(const Real& a) {
  if (a.exact()) return Real(mpq_class(-a.rational()));
  return Real(-a.to_double());
}

bool operator==(const Real& a, const Real& b) {
  if (a.exact() && b.exact()) return a.rational() == b.rational();
  return a.to_double() == b.to_double();
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (a.exact() && b.exact()) {
    const int c = cmp(a.rational(), b.rational());
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  return a.to_double() <=> b.to_double();
}

Real abs(const Real& x) { return x.sign() < 0 ? -x : x; }
Real max(const Real& a, const Real& b) { return (b > a) ? b : a; }
Real min(const Real& a, const Real& b) { return (b < a) ? b : a; }

mpq_class exact_from_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "non-finite value");
  mpq_class q(v);  // GMP converts doubles exactly
  q.canonicalize();
  return q;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad_literal(const std::string& text) {
  throw Error(ErrorCode::InvalidInput, "cannot parse number '" + text + "'");
}

}  // namespace

Real parse_real(const std::string& text, int max_decimals) {
  std::string_view s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad_literal(text);

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    const bool neg = !num.empty() && (num.front() == '-' || num.front() == '+');
    if (!all_digits(neg ? num.substr(1) : num) || !all_digits(den)) bad_literal(text);
    mpq_class q(mpz_class(std::string(num.front() == '+' ? num.substr(1) : num), 10),
                mpz_class(std::string(den), 10));
    if (q.get_den() == 0) throw Error(ErrorCode::InvalidInput, "zero denominator in '" + text + "'");
    q.canonicalize();
    return Real(q);
  }

  // sign, integer digits, optional fraction, optional exponent
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  std::string digits;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits += s[i++];
  std::size_t frac_len = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits += s[i++], ++frac_len;
  }
  if (digits.empty()) bad_literal(text);
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::string_view rest = s.substr(i);
    const bool eneg = !rest.empty() && (rest.front() == '-' || rest.front() == '+');
    if (!all_digits(eneg ? rest.substr(1) : rest)) bad_literal(text);
    auto [p, ec] = std::from_chars(rest.data() + (rest.front() == '+' ? 1 : 0), rest.data() + rest.size(), exponent);
    if (ec != std::errc()) bad_literal(text);
    i = s.size();
  }
  if (i != s.size()) bad_literal(text);

  const long scale = static_cast<long>(frac_len) - exponent;  // value = digits * 10^-scale
  // Trailing zeros in the mantissa do not count as decimal places.
  long places = scale;
  for (auto it = digits.rbegin(); it != digits.rend() && *it == '0' && places > 0; ++it) --places;
  if (places < 0) places = 0;
  if (max_decimals >= 0 && places > max_decimals) return Real(std::stod(std::string(s)));
  if (scale > 4000 || scale < -4000) return Real(std::stod(std::string(s)));

  mpz_class mant(digits, 10);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  mpq_class q = scale >= 0 ? mpq_class(mant, pow10) : mpq_class(mant * pow10);
  q.canonicalize();
  if (negative) q = -q;
  return Real(q);
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(); }

}  // namespace selinf
