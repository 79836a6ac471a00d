#include <algorithm>

#include "optsmt/omt.hpp"
#include "optsmt/smt_core.hpp"

namespace optsmt {

namespace {

void collect_stats(SmtCore &core, OmtStats &st) {
  st.decisions = core.sat().stats().decisions;
  st.conflicts = core.sat().stats().conflicts;
  st.theory_checks = core.la().stats().checks;
  st.minimize_calls = core.la().stats().minimize_calls;
  st.simplex_pivots = core.la().stats().pivots;
}

} // namespace

OmtOutcome solve_offline(const OmtProblem &problem, const OmtConfig &config) {
  SmtOptions options;
  options.pure_literal_filtering = config.pure_literal_filtering;
  options.early_pruning = config.early_pruning;
  if (config.timeout)
    options.deadline = std::chrono::steady_clock::now() + *config.timeout;
  options.seed = config.seed;
  SmtCore core(problem.formula, options);
  const VarId cost = problem.cost;

  OmtOutcome out;
  OmtStats &st = out.stats;
  // Range [l, u[, or [l, u] while the best bound found is an unattained infimum.
  std::optional<Rational> l = problem.lb, u = problem.ub;
  bool u_inclusive = false;
  bool have_best = false;
  bool interrupted = false;
  if (l)
    st.l_trace.push_back(*l);
  if (u)
    st.u_trace.push_back(*u);

  auto bound = [&](const Atom &a, bool positive) {
    PropId p = core.atom(a);
    core.mark_relevant(p);
    return Literal{p, positive};
  };
  if (l)
    core.add_clause({bound(lt_atom(cost, *l), false)});
  if (u)
    core.add_clause({bound(lt_atom(cost, *u), true)});

  for (uint64_t it = 1;; ++it) {
    if (l && u && (*u < *l || (*u == *l && !u_inclusive)))
      break;
    if (core.deadline_passed() || (config.max_iterations && it > *config.max_iterations)) {
      interrupted = true;
      break;
    }
    ++st.iterations;
    bool binary = bin_search_mode(SearchState{l, u, it}, config);
    std::optional<Literal> piv;
    Rational pivot;
    std::vector<Literal> assumptions;
    if (binary) {
      pivot = compute_pivot(l, u);
      piv = bound(lt_atom(cost, pivot), true);
      assumptions.push_back(*piv);
      ++st.pivots;
    }
    sat::SolveResult res = core.solve(assumptions);
    if (res.status == sat::SolveStatus::Interrupted) {
      interrupted = true;
      break;
    }
    if (res.status == sat::SolveStatus::Sat) {
      ++st.sat_iterations;
      MinResult m = core.la().minimize(cost);
      if (m.unbounded) {
        out.status = OmtStatus::Unbounded;
        out.value.reset();
        out.assignment = core.assignment();
        collect_stats(core, st);
        return out;
      }
      Rational v = m.value.real();
      out.value = v;
      out.attained = m.attained;
      out.witness = std::move(m.witness);
      out.assignment = core.assignment();
      have_best = true;
      u = v;
      u_inclusive = !out.attained;
      st.u_trace.push_back(v);
      core.add_clause({bound(out.attained ? lt_atom(cost, v) : le_atom(cost, v), true)});
      continue;
    }
    ++st.unsat_iterations;
    bool blamed = piv && std::find(res.core.begin(), res.core.end(), SmtCore::to_sat(*piv)) !=
                             res.core.end();
    if (blamed) {
      l = pivot;
      st.l_trace.push_back(pivot);
      core.add_clause({~*piv});
      continue;
    }
    if (u) {
      l = u;
      st.l_trace.push_back(*u);
    }
    break;
  }

  collect_stats(core, st);
  if (interrupted) {
    out.status = OmtStatus::Interrupted;
    out.value = u;
    return out;
  }
  if (have_best) {
    out.status = OmtStatus::Optimum;
    return out;
  }
  out.status = OmtStatus::Unsat;
  out.value = problem.ub;
  return out;
}

} // namespace optsmt
