#include "optsmt/formula.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace optsmt {

LinTerm LinTerm::variable(VarId v, Rational coeff) {
  LinTerm t;
  t.add(v, coeff);
  return t;
}

Rational LinTerm::coeff(VarId v) const {
  auto it = std::lower_bound(coeffs_.begin(), coeffs_.end(), v,
                             [](const Entry &e, VarId x) { return e.first < x; });
  if (it != coeffs_.end() && it->first == v)
    return it->second;
  return Rational();
}

LinTerm &LinTerm::add(VarId v, const Rational &c) {
  if (c.is_zero())
    return *this;
  auto it = std::lower_bound(coeffs_.begin(), coeffs_.end(), v,
                             [](const Entry &e, VarId x) { return e.first < x; });
  if (it != coeffs_.end() && it->first == v) {
    it->second += c;
    if (it->second.is_zero())
      coeffs_.erase(it);
  } else {
    coeffs_.insert(it, {v, c});
  }
  return *this;
}

LinTerm &LinTerm::operator+=(const LinTerm &o) {
  for (const auto &[v, c] : o.coeffs_)
    add(v, c);
  constant_ += o.constant_;
  return *this;
}

LinTerm &LinTerm::operator-=(const LinTerm &o) {
  for (const auto &[v, c] : o.coeffs_)
    add(v, -c);
  constant_ -= o.constant_;
  return *this;
}

LinTerm &LinTerm::operator*=(const Rational &k) {
  if (k.is_zero()) {
    coeffs_.clear();
    constant_ = Rational();
    return *this;
  }
  for (auto &e : coeffs_)
    e.second *= k;
  constant_ *= k;
  return *this;
}

LinTerm LinTerm::homogeneous() const {
  LinTerm t = *this;
  t.constant_ = Rational();
  return t;
}

Rational LinTerm::evaluate(std::span<const Rational> valuation) const {
  Rational r = constant_;
  for (const auto &[v, c] : coeffs_)
    r += c * valuation[v];
  return r;
}

DeltaRational LinTerm::evaluate(std::span<const DeltaRational> valuation) const {
  DeltaRational r(constant_);
  for (const auto &[v, c] : coeffs_)
    r += valuation[v] * c;
  return r;
}

namespace {

template <class T> bool rel_holds(const T &value, Rel rel) {
  const T zero{};
  switch (rel) {
  case Rel::LE:
    return value <= zero;
  case Rel::LT:
    return value < zero;
  case Rel::EQ:
    return value == zero;
  }
  return false;
}

} // namespace

bool Atom::holds(std::span<const Rational> valuation) const {
  return rel_holds(term.evaluate(valuation), rel);
}

bool Atom::holds(std::span<const DeltaRational> valuation) const {
  return rel_holds(term.evaluate(valuation), rel);
}

NormalizedAtom normalize_atom(const LinTerm &term, RawRel raw) {
  if (term.is_constant())
    throw std::invalid_argument("normalize_atom: ground constraint");
  LinTerm t = term;
  Rel rel = Rel::LE;
  bool positive = true;
  switch (raw) {
  case RawRel::LE: rel = Rel::LE; break;
  case RawRel::LT: rel = Rel::LT; break;
  case RawRel::EQ: rel = Rel::EQ; break;
  case RawRel::NE: rel = Rel::EQ; positive = false; break;
  case RawRel::GE: rel = Rel::LE; t *= Rational(-1); break;
  case RawRel::GT: rel = Rel::LT; t *= Rational(-1); break;
  }
  Rational lead = t.coeffs().front().second;
  if (rel == Rel::EQ) {
    t *= lead.inverse();
    return {{std::move(t), rel}, positive};
  }
  t *= lead.abs().inverse();
  if (lead.sign() > 0)
    return {{std::move(t), rel}, positive};
  // t ≤ 0  ≡  ¬(−t < 0)   and   t < 0  ≡  ¬(−t ≤ 0)
  t *= Rational(-1);
  return {{std::move(t), rel == Rel::LE ? Rel::LT : Rel::LE}, !positive};
}

bool eval_ground(const Rational &c, RawRel raw) {
  switch (raw) {
  case RawRel::LE: return c.sign() <= 0;
  case RawRel::LT: return c.sign() < 0;
  case RawRel::EQ: return c.sign() == 0;
  case RawRel::NE: return c.sign() != 0;
  case RawRel::GE: return c.sign() >= 0;
  case RawRel::GT: return c.sign() > 0;
  }
  return false;
}

PropId PropTable::add_bool(std::string name) {
  PropId id = static_cast<PropId>(kinds_.size());
  kinds_.push_back(PropKind::Bool);
  bool_index_.emplace(name, id);
  names_.push_back(std::move(name));
  atoms_.emplace_back();
  return id;
}

PropId PropTable::add_label() {
  PropId id = static_cast<PropId>(kinds_.size());
  kinds_.push_back(PropKind::Label);
  names_.push_back("_l" + std::to_string(id));
  atoms_.emplace_back();
  return id;
}

PropId PropTable::intern_atom(const Atom &atom) {
  if (auto it = atom_index_.find(atom); it != atom_index_.end())
    return it->second;
  PropId id = static_cast<PropId>(kinds_.size());
  kinds_.push_back(PropKind::Atom);
  names_.push_back("_a" + std::to_string(id));
  atoms_.push_back(atom);
  atom_index_.emplace(atom, id);
  return id;
}

std::optional<PropId> PropTable::find_atom(const Atom &atom) const {
  if (auto it = atom_index_.find(atom); it != atom_index_.end())
    return it->second;
  return std::nullopt;
}

std::optional<PropId> PropTable::find_bool(const std::string &name) const {
  if (auto it = bool_index_.find(name); it != bool_index_.end())
    return it->second;
  return std::nullopt;
}

VarId VarTable::add(std::string name) {
  VarId id = static_cast<VarId>(names_.size());
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  return id;
}

std::optional<VarId> VarTable::find(const std::string &name) const {
  if (auto it = index_.find(name); it != index_.end())
    return it->second;
  return std::nullopt;
}

bool satisfies(const CnfFormula &f, std::span<const bool> assignment) {
  for (const auto &clause : f.clauses) {
    bool sat = false;
    for (const auto &l : clause)
      if (assignment[l.prop] == l.positive) {
        sat = true;
        break;
      }
    if (!sat)
      return false;
  }
  return true;
}

Atom lt_atom(VarId x, const Rational &c) {
  return {LinTerm::variable(x).add_constant(-c), Rel::LT};
}

Atom le_atom(VarId x, const Rational &c) {
  return {LinTerm::variable(x).add_constant(-c), Rel::LE};
}

Atom eq_atom(VarId x, const Rational &c) {
  return {LinTerm::variable(x).add_constant(-c), Rel::EQ};
}

std::string to_string(const LinTerm &t, const VarTable &vars) {
  std::ostringstream os;
  bool first = true;
  for (const auto &[v, c] : t.coeffs()) {
    if (!first)
      os << (c.sign() < 0 ? " - " : " + ");
    else if (c.sign() < 0)
      os << "-";
    first = false;
    if (c.abs() != Rational(1))
      os << c.abs() << "*";
    os << vars.name(v);
  }
  if (!t.constant().is_zero() || first) {
    if (!first)
      os << (t.constant().sign() < 0 ? " - " : " + ") << t.constant().abs();
    else
      os << t.constant();
  }
  return os.str();
}

std::string to_string(const Atom &a, const VarTable &vars) {
  static constexpr const char *ops[] = {" <= 0", " < 0", " = 0"};
  return to_string(a.term, vars) + ops[static_cast<int>(a.rel)];
}

} // namespace optsmt
