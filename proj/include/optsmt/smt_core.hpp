#pragma once

#include <chrono>
#include <optional>
#include <utility>
#include <vector>

#include "optsmt/formula.hpp"
#include "optsmt/la_solver.hpp"
#include "optsmt/sat_solver.hpp"

namespace optsmt {

struct SmtOptions {
  /// Withhold from the theory solver literals whose polarity occurs in no
  /// clause.
  bool pure_literal_filtering = true;
  /// Check theory consistency (and propagate) on partial assignments.
  bool early_pruning = true;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Nonzero values perturb the initial decision order.
  uint64_t seed = 0;
};

/// Lazy SMT(LA(Q)) engine: the SAT solver enumerates truth assignments of
/// the Boolean abstraction; the simplex solver checks the arithmetic part.
/// Proposition p is SAT variable p.
class SmtCore : public sat::TheoryHooks {
public:
  SmtCore(const CnfFormula &formula, SmtOptions options);

  /// Interns `a`, creating its SAT variable and theory registration if new.
  PropId atom(const Atom &a);
  void add_clause(const Clause &c);
  /// Both polarities of `p` are passed to the theory solver when assigned.
  void mark_relevant(PropId p);

  sat::SolveResult solve(const std::vector<Literal> &assumptions = {});

  static sat::Lit to_sat(Literal l) { return sat::Lit::make(l.prop, !l.positive); }
  static Literal from_sat(sat::Lit l) { return {l.var(), !l.negative()}; }

  sat::SatSolver &sat() { return sat_; }
  LaSolver &la() { return la_; }
  const PropTable &props() const { return props_; }
  std::size_t num_vars() const { return num_vars_; }
  /// Truth values of all propositions after a Sat answer.
  std::vector<bool> assignment() const { return sat_.model(); }
  bool deadline_passed() const;

  sat::HookResult on_partial_assignment(sat::SatSolver &) override;
  sat::HookResult on_complete_assignment(sat::SatSolver &) override;
  void on_backtrack(sat::SatSolver &, int level, std::size_t trail_size) override;
  bool should_interrupt() override { return deadline_passed(); }

protected:
  /// Passes newly assigned theory literals to the simplex solver and runs
  /// check(); returns the explanation of a theory conflict, if any.
  std::optional<LaSolver::Explanation> sync(bool check);
  /// Lemmas that resolve a theory conflict; the default is the clause ¬η.
  virtual std::vector<sat::Lemma> conflict_lemmas(const LaSolver::Explanation &eta);
  static sat::Lemma negation(const LaSolver::Explanation &eta, bool removable = true);
  bool relevant(Literal l) const;
  void count_polarity(const Clause &c);

  sat::SatSolver sat_;
  PropTable props_;
  std::size_t num_vars_;
  LaSolver la_;
  SmtOptions options_;

private:
  std::vector<char> occurs_pos_, occurs_neg_;
  std::size_t synced_ = 0;
  std::vector<std::pair<int, LaSolver::Mark>> marks_;
};

} // namespace optsmt
