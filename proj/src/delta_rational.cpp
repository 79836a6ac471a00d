#include "optsmt/delta_rational.hpp"

#include <ostream>
#include <stdexcept>

namespace optsmt {

std::string DeltaRational::to_string() const {
  if (eps_.is_zero())
    return real_.to_string();
  return "(" + real_.to_string() + (eps_.sign() > 0 ? " + " : " - ") +
         eps_.abs().to_string() + "ε)";
}

std::ostream &operator<<(std::ostream &os, const DeltaRational &d) {
  return os << d.to_string();
}

Rational materialize_epsilon(std::span<const EpsilonConstraint> constraints) {
  Rational best(1);
  const DeltaRational zero;
  for (const auto &c : constraints) {
    const Rational &r = c.term_value.real();
    const Rational &k = c.term_value.eps();
    switch (c.rel) {
    case Rel::EQ:
      if (!r.is_zero() || !k.is_zero())
        throw std::logic_error("materialize_epsilon: equality violated");
      break;
    case Rel::LE:
      if (c.term_value > zero)
        throw std::logic_error("materialize_epsilon: non-strict bound violated");
      // r + kε <= 0 holds for ε <= -r/k when r < 0 < k.
      if (r.sign() < 0 && k.sign() > 0)
        best = min(best, -r / k);
      break;
    case Rel::LT:
      if (c.term_value >= zero)
        throw std::logic_error("materialize_epsilon: strict bound violated");
      // The limit -r/k is excluded for strict constraints; halve it.
      if (r.sign() < 0 && k.sign() > 0)
        best = min(best, -r / (k * Rational(2)));
      break;
    }
  }
  return best;
}

} // namespace optsmt
