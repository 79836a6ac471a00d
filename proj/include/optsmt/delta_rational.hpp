#pragma once

#include <compare>
#include <iosfwd>
#include <span>
#include <string>

#include "optsmt/rational.hpp"

namespace optsmt {

/// A value real + eps_coeff * ε, where ε is a symbolic positive
/// infinitesimal. Ordered lexicographically on (real, eps_coeff).
class DeltaRational {
public:
  DeltaRational() = default;
  DeltaRational(Rational real, Rational eps = Rational())
      : real_(std::move(real)), eps_(std::move(eps)) {}

  const Rational &real() const { return real_; }
  const Rational &eps() const { return eps_; }

  DeltaRational operator-() const { return {-real_, -eps_}; }
  DeltaRational &operator+=(const DeltaRational &o) {
    real_ += o.real_;
    eps_ += o.eps_;
    return *this;
  }
  DeltaRational &operator-=(const DeltaRational &o) {
    real_ -= o.real_;
    eps_ -= o.eps_;
    return *this;
  }
  DeltaRational &operator*=(const Rational &k) {
    real_ *= k;
    eps_ *= k;
    return *this;
  }
  DeltaRational &operator/=(const Rational &k) {
    real_ /= k;
    eps_ /= k;
    return *this;
  }
  friend DeltaRational operator+(DeltaRational a, const DeltaRational &b) { return a += b; }
  friend DeltaRational operator-(DeltaRational a, const DeltaRational &b) { return a -= b; }
  friend DeltaRational operator*(DeltaRational a, const Rational &k) { return a *= k; }
  friend DeltaRational operator*(const Rational &k, DeltaRational a) { return a *= k; }
  friend DeltaRational operator/(DeltaRational a, const Rational &k) { return a /= k; }

  friend bool operator==(const DeltaRational &, const DeltaRational &) = default;
  friend std::strong_ordering operator<=>(const DeltaRational &a, const DeltaRational &b) {
    if (auto c = a.real_ <=> b.real_; c != 0)
      return c;
    return a.eps_ <=> b.eps_;
  }

  /// Substitutes a concrete value for ε.
  Rational at(const Rational &epsilon) const { return real_ + eps_ * epsilon; }

  std::string to_string() const;

private:
  Rational real_;
  Rational eps_;
};

/// Three-way comparison as a plain int (-1, 0, 1).
inline int delta_cmp(const DeltaRational &a, const DeltaRational &b) {
  auto c = a <=> b;
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::ostream &operator<<(std::ostream &os, const DeltaRational &d);

/// Relation of a linear constraint `term ⋄ 0`.
enum class Rel { LE, LT, EQ };

/// The value of a constraint's term under a symbolic valuation, together
/// with the relation the term must satisfy against zero.
struct EpsilonConstraint {
  DeltaRational term_value;
  Rel rel;
};

/// Returns ε₀ > 0 such that every constraint holds for each concrete
/// ε ∈ (0, ε₀]. The result is the minimum of the per-constraint limits,
/// capped at 1. Throws std::logic_error if some constraint is violated
/// under the symbolic (lexicographic) semantics.
Rational materialize_epsilon(std::span<const EpsilonConstraint> constraints);

} // namespace optsmt
