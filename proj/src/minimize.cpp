#include <climits>
#include <stdexcept>

#include "optsmt/la_solver.hpp"

namespace optsmt {

// Bounded-variable primal simplex over ε-extended values. The optimum of the
// ε-extended problem is (m, e) with e ≥ 0; m is the infimum over the reals and
// it is attained iff e = 0.
MinResult LaSolver::minimize(VarId cost) {
  if (!last_check_ok_)
    throw std::logic_error("minimize requires a successful check");
  if (cost < 0 || static_cast<std::size_t>(cost) >= num_user_vars_)
    throw std::out_of_range("unknown cost variable");
  ++stats_.minimize_calls;
  for (;;) {
    std::vector<std::pair<int, Rational>> objective;
    if (row_of_[cost] >= 0)
      objective = rows_[row_of_[cost]].entries;
    else
      objective = {{cost, Rational(1)}};

    int xj = -1;
    int dir = 0;
    for (const auto &[v, r] : objective) {
      if (r.sign() < 0 && below_upper(v)) {
        xj = v;
        dir = 1;
        break;
      }
      if (r.sign() > 0 && above_lower(v)) {
        xj = v;
        dir = -1;
        break;
      }
    }
    if (xj < 0)
      break;

    std::optional<DeltaRational> best;
    int leave_row = -1;
    int leave_var = INT_MAX;
    bool leave_upper = false;
    auto better = [&](const DeltaRational &t, int var) {
      if (!best || t < *best)
        return true;
      if (t != *best || leave_var == cost)
        return false;
      return var == cost || var < leave_var;
    };
    if (dir > 0 && upper_[xj]) {
      best = upper_[xj]->value - beta_[xj];
      leave_var = xj;
    } else if (dir < 0 && lower_[xj]) {
      best = beta_[xj] - lower_[xj]->value;
      leave_var = xj;
    }
    for (int m = 0; m < static_cast<int>(rows_.size()); ++m) {
      const Row &row = rows_[m];
      auto it = std::lower_bound(row.entries.begin(), row.entries.end(), xj,
                                 [](const auto &e, int x) { return e.first < x; });
      if (it == row.entries.end() || it->first != xj)
        continue;
      Rational rate = dir > 0 ? it->second : -it->second;
      int xi = row.basic;
      DeltaRational t;
      bool up = rate.sign() > 0;
      if (up && upper_[xi])
        t = (upper_[xi]->value - beta_[xi]) / rate;
      else if (!up && lower_[xi])
        t = (beta_[xi] - lower_[xi]->value) / -rate;
      else
        continue;
      if (better(t, xi)) {
        best = t;
        leave_row = m;
        leave_var = xi;
        leave_upper = up;
      }
    }
    if (!best) {
      MinResult res;
      res.unbounded = true;
      return res;
    }
    if (leave_row < 0) {
      update(xj, dir > 0 ? upper_[xj]->value : lower_[xj]->value);
    } else {
      int xi = rows_[leave_row].basic;
      pivot_and_update(leave_row, xj, leave_upper ? upper_[xi]->value : lower_[xi]->value);
    }
  }
  MinResult res;
  const DeltaRational &v = beta_[cost];
  res.value = DeltaRational(v.real());
  res.attained = v.eps().is_zero();
  res.witness = model();
  return res;
}

std::optional<MinResult> minimize_conjunction(const PropTable &props, std::size_t num_vars,
                                              const std::vector<Literal> &lits, VarId cost) {
  LaSolver la(num_vars);
  for (Literal l : lits) {
    if (!props.is_atom(l.prop))
      throw std::invalid_argument("conjunction must consist of theory literals");
    la.register_atom(l.prop, props.atom(l.prop));
  }
  for (Literal l : lits)
    if (la.assert_literal(l))
      return std::nullopt;
  if (!la.check())
    return std::nullopt;
  return la.minimize(cost);
}

std::optional<Rational> maximize_conflict_bound(const PropTable &props, std::size_t num_vars,
                                                const std::vector<Literal> &eta, VarId cost,
                                                const Rational &pivot) {
  auto r = minimize_conjunction(props, num_vars, eta, cost);
  if (!r)
    return std::nullopt;
  if (r->unbounded || r->value.real() < pivot)
    throw std::logic_error("conflict set is consistent with cost < pivot");
  return r->value.real();
}

} // namespace optsmt
