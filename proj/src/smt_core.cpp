#include "optsmt/smt_core.hpp"

namespace optsmt {

SmtCore::SmtCore(const CnfFormula &formula, SmtOptions options)
    : props_(formula.props), num_vars_(formula.vars.size()), la_(formula.vars.size()),
      options_(options) {
  for (std::size_t p = 0; p < props_.size(); ++p) {
    sat_.new_var();
    occurs_pos_.push_back(0);
    occurs_neg_.push_back(0);
    if (props_.is_atom(static_cast<PropId>(p)))
      la_.register_atom(static_cast<PropId>(p), props_.atom(static_cast<PropId>(p)));
  }
  if (options_.seed != 0)
    sat_.perturb_order(options_.seed);
  for (const auto &c : formula.clauses)
    add_clause(c);
}

PropId SmtCore::atom(const Atom &a) {
  PropId p = props_.intern_atom(a);
  while (static_cast<std::size_t>(sat_.num_vars()) < props_.size()) {
    sat_.new_var();
    occurs_pos_.push_back(0);
    occurs_neg_.push_back(0);
  }
  la_.register_atom(p, a);
  return p;
}

void SmtCore::count_polarity(const Clause &c) {
  for (const Literal &l : c)
    (l.positive ? occurs_pos_ : occurs_neg_)[l.prop] = 1;
}

void SmtCore::add_clause(const Clause &c) {
  count_polarity(c);
  std::vector<sat::Lit> lits;
  lits.reserve(c.size());
  for (const Literal &l : c)
    lits.push_back(to_sat(l));
  sat_.add_clause(lits);
}

void SmtCore::mark_relevant(PropId p) {
  occurs_pos_[p] = 1;
  occurs_neg_[p] = 1;
}

bool SmtCore::relevant(Literal l) const {
  if (!l.positive && props_.atom(l.prop).rel == Rel::EQ)
    return false; // only positive equalities occur in clauses
  if (!options_.pure_literal_filtering)
    return true;
  return (l.positive ? occurs_pos_ : occurs_neg_)[l.prop] != 0;
}

bool SmtCore::deadline_passed() const {
  return options_.deadline && std::chrono::steady_clock::now() >= *options_.deadline;
}

sat::SolveResult SmtCore::solve(const std::vector<Literal> &assumptions) {
  std::vector<sat::Lit> lits;
  for (const Literal &l : assumptions) {
    if (props_.is_atom(l.prop))
      mark_relevant(l.prop);
    lits.push_back(to_sat(l));
  }
  return sat_.solve(lits, this);
}

std::optional<LaSolver::Explanation> SmtCore::sync(bool check) {
  auto trail = sat_.trail();
  while (synced_ < trail.size()) {
    Literal l = from_sat(trail[synced_]);
    if (props_.is_atom(l.prop) && relevant(l)) {
      int level = sat_.level(l.prop);
      if (marks_.empty() || marks_.back().first < level)
        marks_.emplace_back(level, la_.mark());
      if (auto conflict = la_.assert_literal(l))
        return conflict;
    }
    ++synced_;
  }
  if (check && !la_.check())
    return la_.explanation();
  return std::nullopt;
}

sat::Lemma SmtCore::negation(const LaSolver::Explanation &eta, bool removable) {
  sat::Lemma lemma;
  lemma.removable = removable;
  for (const Literal &l : eta)
    lemma.lits.push_back(to_sat(~l));
  return lemma;
}

std::vector<sat::Lemma> SmtCore::conflict_lemmas(const LaSolver::Explanation &eta) {
  return {negation(eta)};
}

sat::HookResult SmtCore::on_partial_assignment(sat::SatSolver &) {
  sat::HookResult r;
  if (!options_.early_pruning)
    return r;
  if (auto conflict = sync(true)) {
    r.lemmas = conflict_lemmas(*conflict);
    return r;
  }
  for (auto &[implied, why] : la_.theory_propagate()) {
    if (sat_.value(to_sat(implied)) != sat::LBool::Undef)
      continue;
    sat::Lemma lemma = negation(why);
    lemma.lits.insert(lemma.lits.begin(), to_sat(implied));
    r.lemmas.push_back(std::move(lemma));
  }
  return r;
}

sat::HookResult SmtCore::on_complete_assignment(sat::SatSolver &) {
  sat::HookResult r;
  if (auto conflict = sync(true))
    r.lemmas = conflict_lemmas(*conflict);
  return r;
}

void SmtCore::on_backtrack(sat::SatSolver &, int level, std::size_t trail_size) {
  while (!marks_.empty() && marks_.back().first > level) {
    la_.backtrack_to(marks_.back().second);
    marks_.pop_back();
  }
  synced_ = std::min(synced_, trail_size);
}

} // namespace optsmt
