#include "optsmt/la_solver.hpp"

#include <algorithm>
#include <stdexcept>

namespace optsmt {

namespace {

const Rational *find_coeff(const std::vector<std::pair<int, Rational>> &entries, int v) {
  auto it = std::lower_bound(entries.begin(), entries.end(), v,
                             [](const auto &e, int x) { return e.first < x; });
  return it != entries.end() && it->first == v ? &it->second : nullptr;
}

void dedupe(LaSolver::Explanation &e) {
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
}

} // namespace

LaSolver::LaSolver(std::size_t num_vars) {
  for (std::size_t i = 0; i < num_vars; ++i)
    add_var();
}

VarId LaSolver::add_var() {
  if (!rows_.empty())
    throw std::logic_error("problem variables must be added before multi-variable atoms");
  ++num_user_vars_;
  return new_column();
}

int LaSolver::new_column() {
  lower_.emplace_back();
  upper_.emplace_back();
  beta_.emplace_back();
  row_of_.push_back(-1);
  atoms_on_.emplace_back();
  touched_.push_back(0);
  return static_cast<int>(beta_.size() - 1);
}

void LaSolver::add_scaled(std::vector<std::pair<int, Rational>> &dst,
                          const std::vector<std::pair<int, Rational>> &src, const Rational &k,
                          int skip) {
  std::vector<std::pair<int, Rational>> out;
  out.reserve(dst.size() + src.size());
  std::size_t i = 0, j = 0;
  while (i < dst.size() || j < src.size()) {
    if (j < src.size() && src[j].first == skip) {
      ++j;
      continue;
    }
    if (i < dst.size() && dst[i].first == skip) {
      ++i;
      continue;
    }
    if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
      out.push_back(std::move(dst[i++]));
    } else if (i == dst.size() || src[j].first < dst[i].first) {
      out.emplace_back(src[j].first, src[j].second * k);
      ++j;
    } else {
      Rational sum = dst[i].second + src[j].second * k;
      if (!sum.is_zero())
        out.emplace_back(dst[i].first, std::move(sum));
      ++i;
      ++j;
    }
  }
  dst = std::move(out);
}

int LaSolver::term_var(const LinTerm &h) {
  const auto &cs = h.coeffs();
  if (cs.size() == 1 && cs[0].second == Rational(1))
    return cs[0].first;
  if (auto it = slack_of_.find(h); it != slack_of_.end())
    return it->second;
  int s = new_column();
  std::vector<std::pair<int, Rational>> entries;
  DeltaRational value;
  for (const auto &[v, c] : cs) {
    if (v < 0 || static_cast<std::size_t>(v) >= num_user_vars_)
      throw std::out_of_range("atom over unknown variable");
    if (row_of_[v] >= 0)
      add_scaled(entries, rows_[row_of_[v]].entries, c, -1);
    else
      add_scaled(entries, {{v, Rational(1)}}, c, -1);
    value += beta_[v] * c;
  }
  beta_[s] = value;
  row_of_[s] = static_cast<int>(rows_.size());
  rows_.push_back({s, std::move(entries)});
  slack_of_.emplace(h, s);
  return s;
}

void LaSolver::register_atom(PropId p, const Atom &atom) {
  if (atom.term.is_constant())
    throw std::invalid_argument("ground atom cannot be registered");
  LinTerm h = atom.term.homogeneous();
  if (auto it = atoms_.find(p); it != atoms_.end()) {
    int var = term_var(h);
    if (it->second.var != var || it->second.rel != atom.rel ||
        it->second.k != -atom.term.constant())
      throw std::logic_error("proposition already registered with another atom");
    return;
  }
  int var = term_var(h);
  atoms_.emplace(p, AtomInfo{var, -atom.term.constant(), atom.rel});
  atoms_on_[var].push_back(p);
}

bool LaSolver::is_registered(PropId p) const { return atoms_.count(p) != 0; }

void LaSolver::set_bound(int x, bool upper, Bound b) {
  auto &slot = upper ? upper_[x] : lower_[x];
  trail_.push_back({x, upper, slot, -1});
  slot = std::move(b);
  if (!touched_[x]) {
    touched_[x] = 1;
    touched_list_.push_back(x);
  }
  last_check_ok_ = false;
}

std::optional<LaSolver::Explanation> LaSolver::assert_upper(int x, const DeltaRational &c,
                                                            Literal lit) {
  if (upper_[x] && upper_[x]->value <= c)
    return std::nullopt;
  if (lower_[x] && c < lower_[x]->value) {
    Explanation e{lit, lower_[x]->lit};
    dedupe(e);
    return e;
  }
  set_bound(x, true, {c, lit});
  if (row_of_[x] < 0 && beta_[x] > c)
    update(x, c);
  return std::nullopt;
}

std::optional<LaSolver::Explanation> LaSolver::assert_lower(int x, const DeltaRational &c,
                                                            Literal lit) {
  if (lower_[x] && lower_[x]->value >= c)
    return std::nullopt;
  if (upper_[x] && c > upper_[x]->value) {
    Explanation e{lit, upper_[x]->lit};
    dedupe(e);
    return e;
  }
  set_bound(x, false, {c, lit});
  if (row_of_[x] < 0 && beta_[x] < c)
    update(x, c);
  return std::nullopt;
}

std::optional<LaSolver::Explanation> LaSolver::assert_literal(Literal lit) {
  auto it = atoms_.find(lit.prop);
  if (it == atoms_.end())
    throw std::logic_error("literal over unregistered atom");
  const AtomInfo &a = it->second;
  auto known = asserted_.find(lit.prop);
  if (known != asserted_.end() && known->second == lit.positive)
    return std::nullopt;
  Mark m = mark();
  std::optional<Explanation> conflict;
  switch (a.rel) {
  case Rel::LE:
    conflict = lit.positive ? assert_upper(a.var, DeltaRational(a.k), lit)
                            : assert_lower(a.var, DeltaRational(a.k, Rational(1)), lit);
    break;
  case Rel::LT:
    conflict = lit.positive ? assert_upper(a.var, DeltaRational(a.k, Rational(-1)), lit)
                            : assert_lower(a.var, DeltaRational(a.k), lit);
    break;
  case Rel::EQ:
    if (!lit.positive)
      throw std::logic_error("negated equality cannot be asserted");
    conflict = assert_upper(a.var, DeltaRational(a.k), lit);
    if (!conflict)
      conflict = assert_lower(a.var, DeltaRational(a.k), lit);
    break;
  }
  if (conflict) {
    backtrack_to(m);
    return conflict;
  }
  if (known == asserted_.end()) {
    asserted_.emplace(lit.prop, lit.positive);
    trail_.push_back({-1, false, std::nullopt, lit.prop});
  }
  return std::nullopt;
}

void LaSolver::backtrack_to(Mark m) {
  if (m > trail_.size())
    throw std::logic_error("stale backtrack point");
  if (m == trail_.size())
    return;
  while (trail_.size() > m) {
    TrailEntry &e = trail_.back();
    if (e.prop >= 0) {
      asserted_.erase(e.prop);
    } else {
      (e.upper ? upper_ : lower_)[e.var] = std::move(e.old);
      if (!touched_[e.var]) {
        touched_[e.var] = 1;
        touched_list_.push_back(e.var);
      }
    }
    trail_.pop_back();
  }
  last_check_ok_ = false;
}

void LaSolver::update(int x, const DeltaRational &v) {
  DeltaRational delta = v - beta_[x];
  for (auto &r : rows_)
    if (const Rational *a = find_coeff(r.entries, x))
      beta_[r.basic] += delta * *a;
  beta_[x] = v;
}

void LaSolver::pivot(int ri, int xj) {
  Row &r = rows_[ri];
  int xi = r.basic;
  Rational a = *find_coeff(r.entries, xj);
  Rational inv = a.inverse();
  std::vector<std::pair<int, Rational>> fresh;
  fresh.reserve(r.entries.size());
  bool placed = false;
  for (auto &[v, c] : r.entries) {
    if (!placed && xi < v) {
      fresh.emplace_back(xi, inv);
      placed = true;
    }
    if (v != xj)
      fresh.emplace_back(v, -c * inv);
  }
  if (!placed)
    fresh.emplace_back(xi, inv);
  r.basic = xj;
  r.entries = std::move(fresh);
  row_of_[xj] = ri;
  row_of_[xi] = -1;
  for (int m = 0; m < static_cast<int>(rows_.size()); ++m) {
    if (m == ri)
      continue;
    if (const Rational *b = find_coeff(rows_[m].entries, xj)) {
      Rational k = *b;
      add_scaled(rows_[m].entries, rows_[ri].entries, k, xj);
    }
  }
  ++stats_.pivots;
}

void LaSolver::pivot_and_update(int ri, int xj, const DeltaRational &v) {
  int xi = rows_[ri].basic;
  Rational a = *find_coeff(rows_[ri].entries, xj);
  DeltaRational theta = (v - beta_[xi]) / a;
  beta_[xi] = v;
  beta_[xj] += theta;
  for (int m = 0; m < static_cast<int>(rows_.size()); ++m)
    if (m != ri)
      if (const Rational *b = find_coeff(rows_[m].entries, xj))
        beta_[rows_[m].basic] += theta * *b;
  pivot(ri, xj);
}

bool LaSolver::check() {
  ++stats_.checks;
  for (;;) {
    int xi = -1;
    bool low = false;
    for (int v = 0; v < static_cast<int>(beta_.size()); ++v) {
      if (row_of_[v] < 0)
        continue;
      if (lower_[v] && beta_[v] < lower_[v]->value) {
        xi = v;
        low = true;
        break;
      }
      if (upper_[v] && beta_[v] > upper_[v]->value) {
        xi = v;
        break;
      }
    }
    if (xi < 0) {
      last_check_ok_ = true;
      return true;
    }
    const Row &r = rows_[row_of_[xi]];
    int xj = -1;
    for (const auto &[v, a] : r.entries) {
      bool increase = (a.sign() > 0) == low;
      if (increase ? below_upper(v) : above_lower(v)) {
        xj = v;
        break;
      }
    }
    if (xj < 0) {
      explanation_.clear();
      explanation_.push_back(low ? lower_[xi]->lit : upper_[xi]->lit);
      for (const auto &[v, a] : r.entries)
        explanation_.push_back((a.sign() > 0) == low ? upper_[v]->lit : lower_[v]->lit);
      dedupe(explanation_);
      last_check_ok_ = false;
      return false;
    }
    pivot_and_update(row_of_[xi], xj, low ? lower_[xi]->value : upper_[xi]->value);
  }
}

std::vector<std::pair<Literal, LaSolver::Explanation>> LaSolver::theory_propagate() {
  std::vector<std::pair<Literal, Explanation>> out;
  for (int v : touched_list_) {
    touched_[v] = 0;
    const auto &U = upper_[v];
    const auto &L = lower_[v];
    for (PropId p : atoms_on_[v]) {
      if (asserted_.count(p))
        continue;
      const AtomInfo &a = atoms_.at(p);
      DeltaRational k(a.k);
      switch (a.rel) {
      case Rel::LE:
        if (U && U->value <= k)
          out.push_back({{p, true}, {U->lit}});
        else if (L && L->value > k)
          out.push_back({{p, false}, {L->lit}});
        break;
      case Rel::LT:
        if (U && U->value < k)
          out.push_back({{p, true}, {U->lit}});
        else if (L && L->value >= k)
          out.push_back({{p, false}, {L->lit}});
        break;
      case Rel::EQ:
        if (U && L && U->value == k && L->value == k) {
          Explanation e{U->lit, L->lit};
          dedupe(e);
          out.push_back({{p, true}, std::move(e)});
        } else if (U && U->value < k) {
          out.push_back({{p, false}, {U->lit}});
        } else if (L && L->value > k) {
          out.push_back({{p, false}, {L->lit}});
        }
        break;
      }
    }
  }
  touched_list_.clear();
  return out;
}

std::vector<DeltaRational> LaSolver::model() const {
  return {beta_.begin(), beta_.begin() + static_cast<std::ptrdiff_t>(num_user_vars_)};
}

bool LaSolver::consistent() const {
  for (const auto &r : rows_) {
    DeltaRational sum;
    for (const auto &[v, a] : r.entries) {
      if (row_of_[v] >= 0)
        return false;
      sum += beta_[v] * a;
    }
    if (sum != beta_[r.basic])
      return false;
  }
  for (std::size_t v = 0; v < beta_.size(); ++v) {
    if (lower_[v] && beta_[v] < lower_[v]->value)
      return false;
    if (upper_[v] && beta_[v] > upper_[v]->value)
      return false;
  }
  return true;
}

} // namespace optsmt
