#pragma once

#include <compare>
#include <iosfwd>
#include <gmpxx.h>
#include <string>
#include <variant>

namespace selinf {

/// A probability-like scalar that is either an exact rational or a double.
///
/// Arithmetic between two exact values stays exact; anything touching a
/// double degrades to double. `exact()` therefore tells the caller which
/// regime produced a result.
class Real {
 public:
  Real() : value_(mpq_class(0)) {}
  Real(int v) : value_(mpq_class(v)) {}  // NOLINT(google-explicit-constructor)
  Real(long v) : value_(mpq_class(v)) {}  // NOLINT(google-explicit-constructor)
  Real(mpq_class v) : value_(std::move(v)) { std::get<mpq_class>(value_).canonicalize(); }  // NOLINT
  Real(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static Real ratio(long num, long den);

  bool exact() const noexcept { return std::holds_alternative<mpq_class>(value_); }
  const mpq_class& rational() const;
  double to_double() const;

  bool is_zero() const;
  int sign() const;

  // "p/q" (or "p") for exact values, shortest round-trip form for doubles.
  std::string str() const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }
  friend Real operator-(const Real& a);

  friend bool operator==(const Real& a, const Real& b);
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

 private:
  std::variant<mpq_class, double> value_;
};

std::ostream& operator<<(std::ostream& os, const Real& x);

Real abs(const Real& x);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

/// Parses "3", "-2/7", "0.125", "1e-3". Decimal and fraction literals become
/// exact rationals; `max_decimals` bounds how many fractional digits an exact
/// decimal may have (negative means unbounded). Returns a double when the
/// literal cannot be represented exactly under that bound.
Real parse_real(const std::string& text, int max_decimals = -1);

/// Exact value of a finite double.
mpq_class exact_from_double(double v);

}  // namespace selinf
