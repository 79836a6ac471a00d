#include <algorithm>
#include <stdexcept>

#include "optsmt/omt.hpp"
#include "optsmt/smt_core.hpp"

namespace optsmt {

namespace {

// Cost range as ε-extended endpoints: cost ≥ c is (c,0), cost > c is (c,1)
// on the lower side; cost ≤ c is (c,0), cost < c is (c,-1) on the upper side.
struct Range {
  std::optional<DeltaRational> lower, upper;
  bool operator==(const Range &) const = default;
  bool empty() const { return lower && upper && *upper < *lower; }
};

class InlineOptimizer : public SmtCore {
public:
  InlineOptimizer(const OmtProblem &problem, const OmtConfig &config, SmtOptions options)
      : SmtCore(problem.formula, options), config_(config), cost_(problem.cost) {}

  Literal bound(const Atom &a, bool positive) {
    PropId p = atom(a);
    mark_relevant(p);
    return {p, positive};
  }

  sat::HookResult on_partial_assignment(sat::SatSolver &s) override {
    sat::HookResult r;
    if (stop_requested()) {
      r.stop = true;
      return r;
    }
    if (s.decision_level() == 0) {
      update_range();
      if (range_.empty()) {
        r.stop = true;
        return r;
      }
    }
    return SmtCore::on_partial_assignment(s);
  }

  void on_backtrack(sat::SatSolver &s, int level, std::size_t trail_size) override {
    SmtCore::on_backtrack(s, level, trail_size);
    if (trail_size < scanned_) {
      scanned_ = 0;
      range_ = Range{};
      upper_lit_.reset();
    }
  }

  std::optional<sat::Lit> suggest_decision(sat::SatSolver &s) override {
    if (s.decision_level() != 0)
      return std::nullopt;
    if (!iteration_started_ || range_ != iteration_range_) {
      iteration_started_ = true;
      iteration_range_ = range_;
      ++iteration_;
      ++stats.iterations;
      if (config_.max_iterations && iteration_ > *config_.max_iterations)
        budget_exceeded_ = true;
      piv_.reset();
      SearchState st{range_.lower ? std::optional(range_.lower->real()) : std::nullopt,
                     range_.upper ? std::optional(range_.upper->real()) : std::nullopt,
                     iteration_};
      if (bin_search_mode(st, config_)) {
        pivot_ = compute_pivot(st.l, st.u);
        piv_ = bound(lt_atom(cost_, pivot_), true);
        ++stats.pivots;
      }
    }
    if (piv_ && sat_.value(to_sat(*piv_)) == sat::LBool::Undef)
      return to_sat(*piv_);
    return std::nullopt;
  }

  sat::HookResult on_complete_assignment(sat::SatSolver &) override {
    sat::HookResult r;
    if (stop_requested()) {
      r.stop = true;
      return r;
    }
    if (auto conflict = sync(true)) {
      r.lemmas = conflict_lemmas(*conflict);
      return r;
    }
    ++stats.sat_iterations;
    MinResult m = la_.minimize(cost_);
    if (m.unbounded) {
      unbounded = true;
      assignment = sat_.model();
      r.stop = true;
      return r;
    }
    Rational v = m.value.real();
    if (!best || v < *best || (v == *best && m.attained && !attained)) {
      best = v;
      attained = m.attained;
      witness = m.witness;
      assignment = sat_.model();
      stats.u_trace.push_back(v);
    }
    Literal b = bound(m.attained ? lt_atom(cost_, v) : le_atom(cost_, v), true);

    bool b_unassigned = sat_.value(to_sat(b)) == sat::LBool::Undef;
    r.lemmas.push_back({{to_sat(b)}, false});
    if (piv_ && sat_.value(to_sat(*piv_)) == sat::LBool::True && v < pivot_)
      r.lemmas.push_back({{to_sat(*piv_)}, false});
    if (b_unassigned) {
      // Blocking lemma: the current theory literals contradict the new bound.
      LaSolver::Mark mark = la_.mark();
      LaSolver::Explanation eta;
      if (auto conflict = la_.assert_literal(b))
        eta = std::move(*conflict);
      else if (!la_.check())
        eta = la_.explanation();
      else
        throw std::logic_error("assignment admits a model below its minimum");
      la_.backtrack_to(mark);
      r.lemmas.push_back(negation(eta));
    }
    return r;
  }

  OmtConfig config_;
  VarId cost_;
  OmtStats stats;
  std::optional<Rational> best;
  bool attained = false;
  bool unbounded = false;
  std::vector<DeltaRational> witness;
  std::vector<bool> assignment;
  Range range_;

protected:
  std::vector<sat::Lemma> conflict_lemmas(const LaSolver::Explanation &eta) override {
    if (!config_.conflict_generalization || !piv_ ||
        std::find(eta.begin(), eta.end(), *piv_) == eta.end())
      return SmtCore::conflict_lemmas(eta);
    LaSolver::Explanation rest;
    for (const Literal &l : eta)
      if (l != *piv_)
        rest.push_back(l);
    auto m = minimize_conjunction(props_, num_vars_, rest, cost_);
    if (!m)
      return {negation(rest)};
    if (m->unbounded || m->value.real() < pivot_)
      return SmtCore::conflict_lemmas(eta);
    Rational max = m->value.real();
    if (upper_lit_) {
      const Rational &u = range_.upper->real();
      bool strict_u = range_.upper->eps().sign() < 0;
      bool covers = max > u || (max == u && (strict_u || !m->attained));
      if (covers) {
        LaSolver::Explanation c = rest;
        c.push_back(*upper_lit_);
        return {negation(c)};
      }
    }
    if (max > pivot_) {
      Literal lt = bound(lt_atom(cost_, max), true);
      LaSolver::Explanation c1 = rest;
      c1.push_back(lt);
      sat::Lemma c2{{to_sat(~*piv_), to_sat(lt)}, true};
      return {negation(c1), std::move(c2)};
    }
    return SmtCore::conflict_lemmas(eta);
  }

private:
  bool stop_requested() {
    if (deadline_passed())
      timed_out = true;
    return timed_out || budget_exceeded_;
  }

  void update_range() {
    auto trail = sat_.trail();
    Range before = range_;
    for (; scanned_ < trail.size() && sat_.level(trail[scanned_].var()) == 0; ++scanned_) {
      Literal l = from_sat(trail[scanned_]);
      if (!props_.is_atom(l.prop))
        continue;
      const Atom &a = props_.atom(l.prop);
      if (!a.is_bound() || a.term.coeffs()[0].first != cost_)
        continue;
      Rational c = a.bound_value();
      auto lower = [&](DeltaRational d) {
        if (!range_.lower || *range_.lower < d)
          range_.lower = d;
      };
      auto upper = [&](DeltaRational d, Literal why) {
        if (!range_.upper || d < *range_.upper) {
          range_.upper = d;
          upper_lit_ = why;
        }
      };
      switch (a.rel) {
      case Rel::LT:
        if (l.positive)
          upper(DeltaRational(c, Rational(-1)), l);
        else
          lower(DeltaRational(c));
        break;
      case Rel::LE:
        if (l.positive)
          upper(DeltaRational(c), l);
        else
          lower(DeltaRational(c, Rational(1)));
        break;
      case Rel::EQ:
        if (l.positive) {
          upper(DeltaRational(c), l);
          lower(DeltaRational(c));
        }
        break;
      }
    }
    if (range_.lower && range_.lower != before.lower)
      stats.l_trace.push_back(range_.lower->real());
  }

  std::size_t scanned_ = 0;
  std::optional<Literal> upper_lit_;
  std::optional<Literal> piv_;
  Rational pivot_;
  bool iteration_started_ = false;
  Range iteration_range_;
  uint64_t iteration_ = 0;
  bool budget_exceeded_ = false;

public:
  bool timed_out = false;
  bool budget_hit() const { return budget_exceeded_; }
};

} // namespace

OmtOutcome solve_inline(const OmtProblem &problem, const OmtConfig &config) {
  SmtOptions options;
  options.pure_literal_filtering = config.pure_literal_filtering;
  options.early_pruning = config.early_pruning;
  if (config.timeout)
    options.deadline = std::chrono::steady_clock::now() + *config.timeout;
  options.seed = config.seed;
  InlineOptimizer opt(problem, config, options);
  const VarId cost = problem.cost;
  if (problem.lb)
    opt.add_clause({opt.bound(lt_atom(cost, *problem.lb), false)});
  if (problem.ub) {
    opt.add_clause({opt.bound(lt_atom(cost, *problem.ub), true)});
    opt.stats.u_trace.push_back(*problem.ub);
  }

  sat::SolveResult res = opt.solve();

  OmtOutcome out;
  out.stats = std::move(opt.stats);
  OmtStats &st = out.stats;
  st.decisions = opt.sat().stats().decisions;
  st.conflicts = opt.sat().stats().conflicts;
  st.theory_checks = opt.la().stats().checks;
  st.minimize_calls = opt.la().stats().minimize_calls;
  st.simplex_pivots = opt.la().stats().pivots;
  bool interrupted = res.status == sat::SolveStatus::Interrupted || opt.timed_out || opt.budget_hit();

  out.attained = opt.attained;
  out.witness = std::move(opt.witness);
  out.assignment = std::move(opt.assignment);
  if (interrupted) {
    out.status = OmtStatus::Interrupted;
    if (opt.best)
      out.value = opt.best;
    else
      out.value = problem.ub;
    return out;
  }
  if (opt.unbounded) {
    out.status = OmtStatus::Unbounded;
    out.witness.clear();
    out.attained = false;
    return out;
  }
  if (opt.best) {
    out.status = OmtStatus::Optimum;
    out.value = opt.best;
    return out;
  }
  out.status = OmtStatus::Unsat;
  out.value = problem.ub;
  return out;
}

} // namespace optsmt
