#include "optsmt/omt.hpp"

#include <stdexcept>

#include "optsmt/smt_core.hpp"

namespace optsmt {

Rational compute_pivot(const std::optional<Rational> &l, const std::optional<Rational> &u) {
  if (!l || !u)
    throw std::invalid_argument("pivot needs finite bounds");
  if (*l >= *u)
    throw std::invalid_argument("pivot needs l < u");
  return (*l + *u) / Rational(2);
}

bool bin_search_mode(const SearchState &state, const OmtConfig &config) {
  if (config.search == SearchMode::Linear || !state.l || !state.u || *state.l >= *state.u)
    return false;
  if (config.search == SearchMode::BinaryAlways)
    return true;
  return state.iteration % 2 == 1;
}

OmtOutcome solve(const OmtProblem &problem, const OmtConfig &config) {
  return config.schema == Schema::Offline ? solve_offline(problem, config)
                                          : solve_inline(problem, config);
}

namespace {

bool holds_symbolic(const DeltaRational &d, Rel rel) {
  switch (rel) {
  case Rel::LE:
    return d <= DeltaRational();
  case Rel::LT:
    return d < DeltaRational();
  case Rel::EQ:
    return d == DeltaRational();
  }
  return false;
}

// ε₀ keeping every atom's truth value and the bounds as they are under the
// symbolic witness.
Rational model_epsilon(const OmtProblem &problem, const std::vector<DeltaRational> &w) {
  std::vector<EpsilonConstraint> cs;
  const PropTable &props = problem.formula.props;
  for (std::size_t p = 0; p < props.size(); ++p) {
    if (!props.is_atom(static_cast<PropId>(p)))
      continue;
    const Atom &a = props.atom(static_cast<PropId>(p));
    DeltaRational d = a.term.evaluate(w);
    if (holds_symbolic(d, a.rel))
      cs.push_back({d, a.rel});
    else if (a.rel == Rel::LE)
      cs.push_back({-d, Rel::LT});
    else if (a.rel == Rel::LT)
      cs.push_back({-d, Rel::LE});
    else
      cs.push_back({d > DeltaRational() ? -d : d, Rel::LT});
  }
  const DeltaRational &c = w[problem.cost];
  if (problem.lb)
    cs.push_back({DeltaRational(*problem.lb) - c, Rel::LE});
  if (problem.ub)
    cs.push_back({c - DeltaRational(*problem.ub), Rel::LT});
  return materialize_epsilon(cs);
}

} // namespace

std::vector<Rational> concrete_model(const OmtProblem &problem, const OmtOutcome &outcome) {
  if (outcome.witness.empty())
    return {};
  Rational eps = model_epsilon(problem, outcome.witness) / Rational(2);
  std::vector<Rational> out;
  out.reserve(outcome.witness.size());
  for (const auto &d : outcome.witness)
    out.push_back(d.at(eps));
  return out;
}

bool satisfies_problem(const OmtProblem &problem, const std::vector<bool> &assignment,
                       const std::vector<Rational> &values) {
  const PropTable &props = problem.formula.props;
  for (const auto &clause : problem.formula.clauses) {
    bool sat = false;
    for (const Literal &l : clause) {
      bool v = props.is_atom(l.prop) ? props.atom(l.prop).holds(values) : assignment.at(l.prop);
      if (v == l.positive) {
        sat = true;
        break;
      }
    }
    if (!sat)
      return false;
  }
  const Rational &c = values.at(problem.cost);
  if (problem.lb && c < *problem.lb)
    return false;
  if (problem.ub && !(c < *problem.ub))
    return false;
  return true;
}

bool smt_satisfiable(const OmtProblem &problem, const std::vector<std::pair<Atom, bool>> &units) {
  SmtCore core(problem.formula, SmtOptions{});
  if (problem.lb)
    core.add_clause({{core.atom(lt_atom(problem.cost, *problem.lb)), false}});
  if (problem.ub)
    core.add_clause({{core.atom(lt_atom(problem.cost, *problem.ub)), true}});
  for (const auto &[a, positive] : units) {
    PropId p = core.atom(a);
    core.mark_relevant(p);
    core.add_clause({{p, positive}});
  }
  return core.solve().status == sat::SolveStatus::Sat;
}

CrosscheckResult crosscheck(const OmtProblem &problem, const OmtOutcome &outcome) {
  VarId cost = problem.cost;
  switch (outcome.status) {
  case OmtStatus::Optimum: {
    if (!outcome.value)
      return {false, "optimum without value"};
    const Rational &m = *outcome.value;
    if (outcome.attained) {
      if (smt_satisfiable(problem, {{lt_atom(cost, m), true}}))
        return {false, "a model with cost < " + m.to_string() + " exists"};
      if (!smt_satisfiable(problem, {{eq_atom(cost, m), true}}))
        return {false, "no model with cost = " + m.to_string()};
      return {true, ""};
    }
    if (smt_satisfiable(problem, {{le_atom(cost, m), true}}))
      return {false, "a model with cost <= " + m.to_string() + " exists"};
    if (outcome.witness.empty() || !(outcome.witness[cost].eps().sign() > 0))
      return {false, "strict optimum without an ε-positive witness"};
    Rational cap(1, int64_t{1} << 32);
    Rational step = outcome.witness[cost].eps() * model_epsilon(problem, outcome.witness) /
                    Rational(2);
    Rational eps = min(step, cap);
    if (!smt_satisfiable(problem, {{eq_atom(cost, m + eps), true}}))
      return {false, "no model with cost = " + (m + eps).to_string()};
    return {true, ""};
  }
  case OmtStatus::Unsat:
    if (smt_satisfiable(problem, {}))
      return {false, "problem is satisfiable within its bounds"};
    return {true, ""};
  case OmtStatus::Unbounded:
    if (!smt_satisfiable(problem, {{lt_atom(cost, Rational(-(int64_t{1} << 32))), true}}))
      return {false, "no model with cost < -2^32"};
    return {true, ""};
  case OmtStatus::Interrupted:
    return {false, "interrupted run"};
  }
  return {false, "unknown status"};
}

std::string to_string(OmtStatus s) {
  switch (s) {
  case OmtStatus::Optimum:
    return "optimum";
  case OmtStatus::Unsat:
    return "unsat";
  case OmtStatus::Unbounded:
    return "unbounded";
  case OmtStatus::Interrupted:
    return "interrupted";
  }
  return "?";
}

std::string to_string(Schema s) { return s == Schema::Offline ? "offline" : "inline"; }

std::string to_string(SearchMode s) {
  switch (s) {
  case SearchMode::Linear:
    return "linear";
  case SearchMode::BinaryMixed:
    return "binary";
  case SearchMode::BinaryAlways:
    return "binary-always";
  }
  return "?";
}

} // namespace optsmt
