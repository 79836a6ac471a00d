#pragma once

#include <cassert>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace optsmt {

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Backed by GMP.
class Rational {
public:
  Rational() = default;
  Rational(int64_t n) : value_(static_cast<long>(n)) {}
  Rational(int64_t num, int64_t den);
  explicit Rational(mpq_class q) : value_(std::move(q)) { value_.canonicalize(); }

  /// Parses "p", "p/q", "-p/q" or a decimal literal such as "2.75".
  /// Throws std::invalid_argument on malformed input or a zero denominator.
  static Rational parse(std::string_view text);

  Rational operator-() const { return Rational(mpq_class(-value_)); }
  Rational &operator+=(const Rational &o) { value_ += o.value_; return *this; }
  Rational &operator-=(const Rational &o) { value_ -= o.value_; return *this; }
  Rational &operator*=(const Rational &o) { value_ *= o.value_; return *this; }
  Rational &operator/=(const Rational &o) {
    assert(!o.is_zero() && "division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational &b) { return a += b; }
  friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational &b) { return a /= b; }

  friend bool operator==(const Rational &a, const Rational &b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  Rational abs() const { return Rational(mpq_class(::abs(value_))); }
  Rational inverse() const {
    assert(!is_zero() && "division by zero");
    return Rational(mpq_class(1 / value_));
  }

  const mpz_class &num() const { return value_.get_num(); }
  const mpz_class &den() const { return value_.get_den(); }
  const mpq_class &raw() const { return value_; }

  /// "p/q", with "/q" omitted when q == 1.
  std::string to_string() const { return value_.get_str(); }
  double to_double() const { return value_.get_d(); }

  std::size_t hash() const;

private:
  mpq_class value_;
};

std::ostream &operator<<(std::ostream &os, const Rational &r);

Rational min(const Rational &a, const Rational &b);
Rational max(const Rational &a, const Rational &b);

} // namespace optsmt

template <> struct std::hash<optsmt::Rational> {
  std::size_t operator()(const optsmt::Rational &r) const { return r.hash(); }
};
