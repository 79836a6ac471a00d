#include "optsmt/oracle.hpp"

#include <algorithm>
#include <bitset>
#include <map>
#include <set>
#include <stdexcept>

namespace optsmt {

namespace {

// Scales to a leading coefficient of magnitude 1 so that multiples coincide.
FmConstraint normalized(FmConstraint c) {
  if (!c.term.is_constant()) {
    Rational lead = c.term.coeffs()[0].second.abs();
    c.term *= lead.inverse();
  }
  return c;
}

bool ground_holds(const FmConstraint &c) {
  int s = c.term.constant().sign();
  return c.strict ? s < 0 : s <= 0;
}

} // namespace

std::vector<FmConstraint> fm_constraints(std::span<const Atom> atoms) {
  std::vector<FmConstraint> out;
  for (const Atom &a : atoms) {
    switch (a.rel) {
    case Rel::LE:
      out.push_back({a.term, false});
      break;
    case Rel::LT:
      out.push_back({a.term, true});
      break;
    case Rel::EQ:
      out.push_back({a.term, false});
      out.push_back({-a.term, false});
      break;
    }
  }
  return out;
}

namespace {

// A constraint with the set of input constraints it was combined from.
struct Row {
  FmConstraint c;
  std::bitset<2 * kFmMaxAtoms> origin;
};

// One elimination step. Combinations of more than `max_origin` inputs are
// dropped; exact duplicates keep the smaller origin set.
std::vector<Row> eliminate(const std::vector<Row> &system, VarId v, std::size_t max_origin) {
  std::vector<const Row *> pos, neg;
  std::map<FmConstraint, std::bitset<2 * kFmMaxAtoms>> out;
  bool contradiction = false;
  auto keep = [&](FmConstraint c, const std::bitset<2 * kFmMaxAtoms> &origin) {
    if (origin.count() > max_origin)
      return;
    c = normalized(std::move(c));
    if (c.term.is_constant()) {
      contradiction = contradiction || !ground_holds(c);
      return;
    }
    auto [it, fresh] = out.try_emplace(std::move(c), origin);
    if (!fresh && origin.count() < it->second.count())
      it->second = origin;
  };
  for (const Row &r : system) {
    int s = r.c.term.coeff(v).sign();
    if (s > 0)
      pos.push_back(&r);
    else if (s < 0)
      neg.push_back(&r);
    else
      keep(r.c, r.origin);
  }
  for (const Row *p : pos) {
    Rational a = p->c.term.coeff(v);
    for (const Row *n : neg) {
      Rational b = -n->c.term.coeff(v);
      keep({p->c.term * b + n->c.term * a, p->c.strict || n->c.strict}, p->origin | n->origin);
    }
  }
  if (contradiction)
    return {Row{FmConstraint{LinTerm(Rational(1)), false}, {}}};
  std::vector<Row> rows;
  for (auto &[c, origin] : out)
    rows.push_back({c, origin});
  return rows;
}

} // namespace

std::vector<FmConstraint> fm_eliminate(const std::vector<FmConstraint> &system, VarId v) {
  if (system.size() > 2 * kFmMaxAtoms)
    throw std::length_error("fm_eliminate: too many constraints");
  std::vector<Row> rows;
  for (const FmConstraint &c : system)
    rows.push_back({c, {}});
  std::vector<FmConstraint> out;
  for (Row &r : eliminate(rows, v, SIZE_MAX))
    out.push_back(std::move(r.c));
  return out;
}

FmResult fm_minimize(std::span<const Atom> atoms, VarId objective) {
  if (atoms.size() > kFmMaxAtoms)
    throw std::length_error("fm_minimize: too many atoms");
  std::set<VarId> vars;
  for (const Atom &a : atoms)
    for (const auto &[v, c] : a.term.coeffs())
      vars.insert(v);
  vars.insert(objective);
  if (vars.size() > kFmMaxVars)
    throw std::length_error("fm_minimize: too many variables");
  vars.erase(objective);

  std::vector<Row> system;
  for (FmConstraint &c : fm_constraints(atoms)) {
    system.push_back({std::move(c), {}});
    system.back().origin.set(system.size() - 1);
  }
  // After k eliminations a combination of more than k + 1 inputs is implied
  // by the others (Chernikov).
  std::size_t eliminated = 0;
  while (!vars.empty()) {
    // Eliminate the variable producing the fewest combinations.
    VarId best = *vars.begin();
    std::size_t best_cost = SIZE_MAX;
    for (VarId v : vars) {
      std::size_t p = 0, n = 0;
      for (const Row &r : system) {
        int s = r.c.term.coeff(v).sign();
        p += s > 0;
        n += s < 0;
      }
      if (p * n < best_cost) {
        best_cost = p * n;
        best = v;
      }
    }
    system = eliminate(system, best, ++eliminated + 1);
    vars.erase(best);
  }

  FmResult res;
  std::optional<Rational> lower, upper;
  bool lower_strict = false, upper_strict = false;
  for (const Row &r : system) {
    const FmConstraint &c = r.c;
    Rational a = c.term.coeff(objective);
    if (a.is_zero()) {
      if (!ground_holds(c))
        return res;
      continue;
    }
    Rational bound = -c.term.constant() / a;
    if (a.sign() < 0) {
      if (!lower || bound > *lower) {
        lower = bound;
        lower_strict = c.strict;
      } else if (bound == *lower) {
        lower_strict = lower_strict || c.strict;
      }
    } else {
      if (!upper || bound < *upper) {
        upper = bound;
        upper_strict = c.strict;
      } else if (bound == *upper) {
        upper_strict = upper_strict || c.strict;
      }
    }
  }
  if (lower && upper && (*upper < *lower || (*upper == *lower && (lower_strict || upper_strict))))
    return res;
  if (!lower) {
    res.status = FmResult::Status::Unbounded;
    return res;
  }
  res.status = FmResult::Status::Bounded;
  res.value = *lower;
  res.attained = !lower_strict;
  return res;
}

namespace {

Atom negate(const Atom &a) {
  if (a.rel == Rel::EQ)
    throw std::logic_error("negated equality is not a single atom");
  // ¬(t ≤ 0) ≡ -t < 0 and ¬(t < 0) ≡ -t ≤ 0; FM needs no canonical form.
  return {-a.term, a.rel == Rel::LE ? Rel::LT : Rel::LE};
}

class Enumerator {
public:
  explicit Enumerator(const OmtProblem &problem) : problem_(problem) {
    const PropTable &props = problem.formula.props;
    std::size_t counted = 0;
    for (std::size_t p = 0; p < props.size(); ++p) {
      if (props.kind(static_cast<PropId>(p)) != PropKind::Label)
        ++counted;
      if (props.is_atom(static_cast<PropId>(p)))
        atoms_.push_back(static_cast<PropId>(p));
    }
    if (counted > kOracleMaxProps)
      throw std::length_error("oracle_solve: too many propositions");
    if (problem.lb)
      fixed_.push_back(negate(lt_atom(problem.cost, *problem.lb)));
    if (problem.ub)
      fixed_.push_back(lt_atom(problem.cost, *problem.ub));
    values_.assign(props.size(), -1);
  }

  OmtOutcome run() {
    OmtOutcome out;
    if (boolean_feasible())
      descend(0);
    if (unbounded_) {
      out.status = OmtStatus::Unbounded;
    } else if (best_) {
      out.status = OmtStatus::Optimum;
      out.value = best_;
      out.attained = attained_;
    } else {
      out.status = OmtStatus::Unsat;
      out.value = problem_.ub;
    }
    return out;
  }

private:
  void descend(std::size_t i) {
    if (unbounded_)
      return;
    if (i == atoms_.size()) {
      leaf();
      return;
    }
    PropId p = atoms_[i];
    for (int8_t v : {1, 0}) {
      values_[p] = v;
      if (theory_feasible() && boolean_feasible())
        descend(i + 1);
    }
    values_[p] = -1;
  }

  // Conjunction of the assigned atoms; false equalities are left out.
  std::vector<Atom> conjunction(std::vector<Atom> *disequalities) const {
    std::vector<Atom> out = fixed_;
    for (PropId p : atoms_) {
      if (values_[p] < 0)
        continue;
      const Atom &a = problem_.formula.props.atom(p);
      if (values_[p])
        out.push_back(a);
      else if (a.rel != Rel::EQ)
        out.push_back(negate(a));
      else if (disequalities)
        disequalities->push_back(a);
    }
    return out;
  }

  bool theory_feasible() const {
    std::vector<Atom> c = conjunction(nullptr);
    return fm_minimize(c, problem_.cost).status != FmResult::Status::Infeasible;
  }

  void leaf() {
    std::vector<Atom> diseq;
    std::vector<Atom> base = conjunction(&diseq);
    // t ≠ 0 splits into t < 0 or t > 0.
    for (std::size_t mask = 0; mask < (std::size_t(1) << diseq.size()); ++mask) {
      std::vector<Atom> c = base;
      for (std::size_t k = 0; k < diseq.size(); ++k)
        c.push_back({(mask >> k) & 1 ? -diseq[k].term : diseq[k].term, Rel::LT});
      FmResult r = fm_minimize(c, problem_.cost);
      if (r.status == FmResult::Status::Unbounded) {
        unbounded_ = true;
        return;
      }
      if (r.status == FmResult::Status::Infeasible)
        continue;
      if (!best_ || r.value < *best_) {
        best_ = r.value;
        attained_ = r.attained;
      } else if (r.value == *best_) {
        attained_ = attained_ || r.attained;
      }
    }
  }

  // Whether the clauses have a model extending the current atom values.
  bool boolean_feasible() const {
    std::vector<int8_t> values = values_;
    return dpll(values);
  }

  bool dpll(std::vector<int8_t> &values) const {
    for (;;) {
      bool changed = false;
      PropId open = -1;
      for (const Clause &c : problem_.formula.clauses) {
        int unassigned = 0;
        Literal last{};
        bool sat = false;
        for (const Literal &l : c) {
          int8_t v = values[l.prop];
          if (v < 0) {
            ++unassigned;
            last = l;
          } else if ((v == 1) == l.positive) {
            sat = true;
            break;
          }
        }
        if (sat)
          continue;
        if (unassigned == 0)
          return false;
        if (unassigned == 1) {
          values[last.prop] = last.positive ? 1 : 0;
          changed = true;
        } else if (open < 0) {
          open = last.prop;
        }
      }
      if (changed)
        continue;
      if (open < 0)
        return true;
      for (int8_t v : {1, 0}) {
        std::vector<int8_t> copy = values;
        copy[open] = v;
        if (dpll(copy))
          return true;
      }
      return false;
    }
  }

  const OmtProblem &problem_;
  std::vector<PropId> atoms_;
  std::vector<Atom> fixed_;
  std::vector<int8_t> values_;
  std::optional<Rational> best_;
  bool attained_ = false;
  bool unbounded_ = false;
};

} // namespace

OmtOutcome oracle_solve(const OmtProblem &problem) { return Enumerator(problem).run(); }

} // namespace optsmt
