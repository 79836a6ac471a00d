#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "optsmt/delta_rational.hpp"
#include "optsmt/rational.hpp"

namespace optsmt {

/// Index of a rational-valued variable.
using VarId = int32_t;
/// Index of a proposition: a Boolean variable, a CNF label, or an LA(Q) atom.
using PropId = int32_t;

/// Linear term  Σ coeff·var + constant.  Coefficients are kept sorted by
/// variable id and never stored as zero.
class LinTerm {
public:
  using Entry = std::pair<VarId, Rational>;

  LinTerm() = default;
  explicit LinTerm(Rational constant) : constant_(std::move(constant)) {}
  static LinTerm variable(VarId v, Rational coeff = Rational(1));

  const std::vector<Entry> &coeffs() const { return coeffs_; }
  const Rational &constant() const { return constant_; }
  bool is_constant() const { return coeffs_.empty(); }
  Rational coeff(VarId v) const;

  LinTerm &add(VarId v, const Rational &c);
  LinTerm &add_constant(const Rational &c) {
    constant_ += c;
    return *this;
  }
  LinTerm &operator+=(const LinTerm &o);
  LinTerm &operator-=(const LinTerm &o);
  LinTerm &operator*=(const Rational &k);
  friend LinTerm operator+(LinTerm a, const LinTerm &b) { return a += b; }
  friend LinTerm operator-(LinTerm a, const LinTerm &b) { return a -= b; }
  friend LinTerm operator*(LinTerm a, const Rational &k) { return a *= k; }
  LinTerm operator-() const { return *this * Rational(-1); }

  /// Same term with the constant dropped.
  LinTerm homogeneous() const;

  Rational evaluate(std::span<const Rational> valuation) const;
  DeltaRational evaluate(std::span<const DeltaRational> valuation) const;

  friend bool operator==(const LinTerm &, const LinTerm &) = default;
  friend auto operator<=>(const LinTerm &, const LinTerm &) = default;

private:
  std::vector<Entry> coeffs_;
  Rational constant_;
};

/// Canonical LA(Q) atom `term rel 0` with rel ∈ {≤, <, =}. The lowest-id
/// variable of `term` has coefficient +1.
struct Atom {
  LinTerm term;
  Rel rel = Rel::LE;

  /// Single-variable atoms are plain bounds on that variable.
  bool is_bound() const { return term.coeffs().size() == 1; }
  /// For a bound atom `x + c rel 0`, the bound value -c.
  Rational bound_value() const { return -term.constant(); }

  bool holds(std::span<const Rational> valuation) const;
  bool holds(std::span<const DeltaRational> valuation) const;

  friend bool operator==(const Atom &, const Atom &) = default;
  friend auto operator<=>(const Atom &, const Atom &) = default;
};

/// Relations accepted on the input side; ≠, ≥ and > are removed by
/// normalization.
enum class RawRel { LE, LT, EQ, NE, GE, GT };

/// A canonical atom plus the polarity under which it is equivalent to the
/// raw constraint it came from.
struct NormalizedAtom {
  Atom atom;
  bool positive = true;
};

/// Normalizes `term raw 0`. The term must mention at least one variable;
/// ground constraints are folded by the caller.
NormalizedAtom normalize_atom(const LinTerm &term, RawRel raw);
inline NormalizedAtom normalize_atom(const LinTerm &lhs, RawRel raw,
                                     const Rational &rhs) {
  return normalize_atom(LinTerm(lhs).add_constant(-rhs), raw);
}

/// Truth value of a ground constraint `c raw 0`.
bool eval_ground(const Rational &c, RawRel raw);

struct Literal {
  PropId prop = 0;
  bool positive = true;

  Literal operator~() const { return {prop, !positive}; }
  friend bool operator==(const Literal &, const Literal &) = default;
  friend auto operator<=>(const Literal &, const Literal &) = default;
};

using Clause = std::vector<Literal>;

enum class PropKind { Bool, Label, Atom };

/// Interning table for propositions. Atoms are shared: interning the same
/// canonical atom twice returns the same id.
class PropTable {
public:
  PropId add_bool(std::string name);
  PropId add_label();
  PropId intern_atom(const Atom &atom);
  std::optional<PropId> find_atom(const Atom &atom) const;
  std::optional<PropId> find_bool(const std::string &name) const;

  std::size_t size() const { return kinds_.size(); }
  PropKind kind(PropId p) const { return kinds_[p]; }
  bool is_atom(PropId p) const { return kinds_[p] == PropKind::Atom; }
  const Atom &atom(PropId p) const { return atoms_[p]; }
  const std::string &name(PropId p) const { return names_[p]; }

private:
  std::vector<PropKind> kinds_;
  std::vector<std::string> names_;
  std::vector<Atom> atoms_;
  std::map<Atom, PropId> atom_index_;
  std::map<std::string, PropId> bool_index_;
};

/// Names of the rational variables.
class VarTable {
public:
  VarId add(std::string name);
  std::optional<VarId> find(const std::string &name) const;
  const std::string &name(VarId v) const { return names_[v]; }
  std::size_t size() const { return names_.size(); }

private:
  std::vector<std::string> names_;
  std::map<std::string, VarId> index_;
};

struct CnfFormula {
  std::vector<Clause> clauses;
  PropTable props;
  VarTable vars;
};

/// Truth of every clause under a total proposition assignment.
bool satisfies(const CnfFormula &f, std::span<const bool> assignment);

/// An OMT(LA(Q)) instance: minimize `cost` subject to `formula`, with an
/// optional non-strict lower bound and strict upper bound.
struct OmtProblem {
  CnfFormula formula;
  VarId cost = 0;
  std::optional<Rational> lb;
  std::optional<Rational> ub;
};

/// Canonical bound atoms on a single variable.
/// `x < c` and `x <= c` in canonical form.
Atom lt_atom(VarId x, const Rational &c);
Atom le_atom(VarId x, const Rational &c);
Atom eq_atom(VarId x, const Rational &c);

std::string to_string(const LinTerm &t, const VarTable &vars);
std::string to_string(const Atom &a, const VarTable &vars);

} // namespace optsmt
