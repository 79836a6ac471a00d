#include "optsmt/sat_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace optsmt::sat {

namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr double kRestartBase = 100;

// Luby sequence 1 1 2 1 1 2 4 ... scaled by powers of y.
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

} // namespace

SatSolver::SatSolver() = default;

Var SatSolver::new_var() {
  Var v = num_vars();
  assigns_.push_back(LBool::Undef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  frame_dep_.push_back(0);
  seen_.push_back(0);
  phase_.push_back(1);
  activity_.push_back(0);
  heap_index_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

void SatSolver::perturb_order(uint64_t seed) {
  uint64_t state = seed;
  for (Var v = 0; v < num_vars(); ++v) {
    // splitmix64
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    activity_[v] = static_cast<double>(z >> 11) * 0x1p-53 * 1e-3;
  }
  heap_.clear();
  std::fill(heap_index_.begin(), heap_index_.end(), -1);
  for (Var v = 0; v < num_vars(); ++v)
    if (assigns_[v] == LBool::Undef)
      heap_insert(v);
}

void SatSolver::check_lits(std::span<const Lit> lits) const {
  for (Lit l : lits)
    if (l.code < 0 || l.var() >= num_vars())
      throw std::out_of_range("literal over unknown variable");
}

bool SatSolver::normalize(std::vector<Lit> &lits) const {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 0; i + 1 < lits.size(); ++i)
    if (lits[i].var() == lits[i + 1].var())
      return false;
  return true;
}

SatSolver::CRef SatSolver::store(std::vector<Lit> lits, int frame, bool learnt, bool lemma,
                                 bool removable) {
  ClauseData d;
  d.lits = std::move(lits);
  d.frame = frame;
  d.learnt = learnt;
  d.lemma = lemma;
  d.removable = removable;
  if (learnt || lemma)
    d.lbd = compute_lbd(d.lits);
  if (!free_.empty()) {
    CRef c = free_.back();
    free_.pop_back();
    clauses_[c] = std::move(d);
    return c;
  }
  clauses_.push_back(std::move(d));
  return static_cast<CRef>(clauses_.size() - 1);
}

void SatSolver::attach(CRef c) {
  const auto &lits = clauses_[c].lits;
  watches_[lits[0].code].push_back({c, lits[1]});
  watches_[lits[1].code].push_back({c, lits[0]});
}

void SatSolver::sweep_watches() {
  for (auto &ws : watches_)
    std::erase_if(ws, [&](const Watcher &w) { return clauses_[w.cref].removed; });
  for (CRef c = 0; c < static_cast<CRef>(clauses_.size()); ++c) {
    auto &d = clauses_[c];
    if (d.removed && !d.lits.empty()) {
      d.lits = {};
      free_.push_back(c);
    }
  }
}

void SatSolver::enqueue(Lit l, CRef reason) {
  Var v = l.var();
  assigns_[v] = l.negative() ? LBool::False : LBool::True;
  level_[v] = decision_level();
  reason_[v] = reason;
  if (decision_level() == 0) {
    int dep = 0;
    if (reason != kNoReason) {
      const auto &lits = clauses_[reason].lits;
      dep = clauses_[reason].frame;
      for (std::size_t i = 1; i < lits.size(); ++i)
        dep = std::max(dep, frame_dep_[lits[i].var()]);
    }
    frame_dep_[v] = dep;
  }
  trail_.push_back(l);
}

SatSolver::CRef SatSolver::propagate() {
  CRef confl = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = ~p;
    auto &ws = watches_[false_lit.code];
    ++stats_.propagations;
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      Watcher w = ws[i];
      if (value(w.blocker) == LBool::True) {
        ws[j++] = ws[i++];
        continue;
      }
      auto &c = clauses_[w.cref].lits;
      if (c[0] == false_lit)
        std::swap(c[0], c[1]);
      Lit first = c[0];
      if (first != w.blocker && value(first) == LBool::True) {
        ws[j++] = {w.cref, first};
        ++i;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != LBool::False) {
          std::swap(c[1], c[k]);
          watches_[c[1].code].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      ++i;
      if (moved)
        continue;
      ws[j++] = {w.cref, first};
      if (value(first) == LBool::False) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size())
          ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (confl != kNoReason)
      break;
  }
  return confl;
}

void SatSolver::cancel_until(int level) {
  if (decision_level() <= level)
    return;
  std::size_t keep = trail_lim_[level];
  for (std::size_t i = trail_.size(); i-- > keep;) {
    Var v = trail_[i].var();
    assigns_[v] = LBool::Undef;
    reason_[v] = kNoReason;
    phase_[v] = trail_[i].negative();
    heap_insert(v);
  }
  trail_.resize(keep);
  trail_lim_.resize(level);
  qhead_ = std::min(qhead_, trail_.size());
  pending_level_ = pending_notify_ ? std::min(pending_level_, level) : level;
  pending_trail_ = pending_notify_ ? std::min(pending_trail_, keep) : keep;
  pending_notify_ = true;
  notify_backtrack();
}

void SatSolver::notify_backtrack() {
  if (pending_notify_ && hooks_) {
    pending_notify_ = false;
    hooks_->on_backtrack(*this, pending_level_, pending_trail_);
  }
}

void SatSolver::full_reset() {
  cancel_until(0);
  for (Lit l : trail_) {
    Var v = l.var();
    assigns_[v] = LBool::Undef;
    reason_[v] = kNoReason;
    phase_[v] = l.negative();
    heap_insert(v);
  }
  trail_.clear();
  qhead_ = 0;
  pending_notify_ = true;
  pending_level_ = -1;
  pending_trail_ = 0;
  needs_replay_ = true;
  notify_backtrack();
}

void SatSolver::replay_units() {
  for (CRef c : units_) {
    Lit l = clauses_[c].lits[0];
    if (value(l) == LBool::Undef)
      enqueue(l, c);
    else if (value(l) == LBool::False)
      mark_unsat();
  }
}

void SatSolver::add_clause(std::span<const Lit> lits) {
  check_lits(lits);
  std::vector<Lit> v(lits.begin(), lits.end());
  if (!normalize(v))
    return;
  cancel_until(0);
  if (v.empty()) {
    mark_unsat();
    return;
  }
  std::stable_partition(v.begin(), v.end(), [&](Lit l) { return value(l) != LBool::False; });
  CRef c = store(std::move(v), frame_depth_, false, false, false);
  const auto &cl = clauses_[c].lits;
  if (cl.size() == 1) {
    units_.push_back(c);
    if (value(cl[0]) == LBool::Undef)
      enqueue(cl[0], c);
    else if (value(cl[0]) == LBool::False)
      mark_unsat();
    return;
  }
  attach(c);
  if (value(cl[0]) == LBool::False)
    mark_unsat();
  else if (value(cl[1]) == LBool::False && value(cl[0]) == LBool::Undef)
    enqueue(cl[0], c);
}

void SatSolver::push_frame() { ++frame_depth_; }

void SatSolver::pop_frame() {
  if (frame_depth_ == 0)
    throw std::logic_error("pop_frame without matching push_frame");
  full_reset();
  --frame_depth_;
  for (auto &d : clauses_)
    if (!d.removed && d.frame > frame_depth_)
      d.removed = true;
  std::erase_if(units_, [&](CRef c) { return clauses_[c].removed; });
  sweep_watches();
  if (unsat_frame_ > frame_depth_)
    unsat_frame_ = -1;
}

std::vector<bool> SatSolver::model() const {
  std::vector<bool> m(assigns_.size());
  for (std::size_t v = 0; v < assigns_.size(); ++v)
    m[v] = assigns_[v] == LBool::True;
  return m;
}

std::vector<std::vector<Lit>> SatSolver::learned_clauses() const {
  std::vector<std::vector<Lit>> out;
  for (const auto &d : clauses_)
    if (d.learnt && !d.removed)
      out.push_back(d.lits);
  return out;
}

SolveResult SatSolver::solve(std::span<const Lit> assumptions, TheoryHooks *hooks) {
  check_lits(assumptions);
  hooks_ = hooks;
  assumptions_.assign(assumptions.begin(), assumptions.end());
  notify_backtrack();
  cancel_until(0);
  if (needs_replay_) {
    needs_replay_ = false;
    replay_units();
  }
  SolveResult res;
  Outcome out = Outcome::Unsat;
  if (!unsat_flagged()) {
    for (int round = 0;; ++round) {
      double budget = restarts_enabled_ ? luby(2, round) * kRestartBase
                                        : std::numeric_limits<double>::infinity();
      out = search(budget >= 1e18 ? std::numeric_limits<uint64_t>::max()
                                  : static_cast<uint64_t>(budget),
                   res);
      if (out != Outcome::Restart)
        break;
      ++stats_.restarts;
    }
  }
  switch (out) {
  case Outcome::Sat:
    res.status = SolveStatus::Sat;
    break;
  case Outcome::Interrupted:
    res.status = SolveStatus::Interrupted;
    cancel_until(0);
    break;
  default:
    res.status = SolveStatus::Unsat;
    cancel_until(0);
  }
  hooks_ = nullptr;
  return res;
}

SatSolver::Outcome SatSolver::search(uint64_t budget, SolveResult &res) {
  uint64_t conflicts = 0;
  for (;;) {
    CRef confl = propagate();
    if (confl != kNoReason) {
      ++stats_.conflicts;
      ++conflicts;
      if (decision_level() == 0) {
        mark_unsat();
        return Outcome::Unsat;
      }
      handle_conflict(confl);
      if (hooks_ && hooks_->should_interrupt())
        return Outcome::Interrupted;
      continue;
    }
    if (hooks_) {
      HookResult r = hooks_->on_partial_assignment(*this);
      bool changed = false;
      if (!apply_hook(r, changed))
        return Outcome::Unsat;
      if (r.stop) {
        res.stopped = true;
        return Outcome::Unsat;
      }
      if (changed)
        continue;
    }
    if (conflicts >= budget) {
      cancel_until(std::min(decision_level(), static_cast<int>(assumptions_.size())));
      return Outcome::Restart;
    }
    if (stats_.conflicts >= next_reduce_)
      reduce_db();

    Lit next;
    while (decision_level() < static_cast<int>(assumptions_.size())) {
      Lit p = assumptions_[decision_level()];
      if (value(p) == LBool::True) {
        new_decision_level();
      } else if (value(p) == LBool::False) {
        res.core = analyze_final(p);
        return Outcome::Unsat;
      } else {
        next = p;
        break;
      }
    }
    if (next.undef() && hooks_) {
      auto s = hooks_->suggest_decision(*this);
      if (s && value(*s) == LBool::Undef)
        next = *s;
    }
    if (next.undef()) {
      next = pick_branch();
      if (next.undef()) {
        if (hooks_) {
          HookResult r = hooks_->on_complete_assignment(*this);
          bool changed = false;
          if (!apply_hook(r, changed))
            return Outcome::Unsat;
          if (r.stop) {
            res.stopped = true;
            return Outcome::Unsat;
          }
          // Lemmas already satisfied by a total assignment leave the model valid.
          if (changed)
            continue;
        }
        return Outcome::Sat;
      }
    }
    ++stats_.decisions;
    if (hooks_ && (stats_.decisions & 1023) == 0 && hooks_->should_interrupt())
      return Outcome::Interrupted;
    new_decision_level();
    enqueue(next, kNoReason);
  }
}

void SatSolver::analyze(CRef confl, std::vector<Lit> &out, int &bt_level, int &frame) {
  out.assign(1, Lit{});
  frame = 0;
  int path = 0;
  Lit p;
  std::size_t index = trail_.size();
  do {
    ClauseData &c = clauses_[confl];
    frame = std::max(frame, c.frame);
    if (c.learnt || c.lemma)
      bump_clause(c);
    for (std::size_t j = p.undef() ? 0 : 1; j < c.lits.size(); ++j) {
      Lit q = c.lits[j];
      Var v = q.var();
      if (level_[v] == 0) {
        frame = std::max(frame, frame_dep_[v]);
        continue;
      }
      if (seen_[v])
        continue;
      seen_[v] = 1;
      bump_var(v);
      if (level_[v] >= decision_level())
        ++path;
      else
        out.push_back(q);
    }
    while (!seen_[trail_[--index].var()]) {
    }
    p = trail_[index];
    confl = reason_[p.var()];
    seen_[p.var()] = 0;
    --path;
  } while (path > 0);
  out[0] = ~p;

  std::vector<Lit> kept{out[0]};
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!redundant(out[i], frame))
      kept.push_back(out[i]);
  for (std::size_t i = 1; i < out.size(); ++i)
    seen_[out[i].var()] = 0;
  out = std::move(kept);

  bt_level = 0;
  if (out.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < out.size(); ++i)
      if (level_[out[i].var()] > level_[out[max_i].var()])
        max_i = i;
    std::swap(out[1], out[max_i]);
    bt_level = level_[out[1].var()];
  }
}

bool SatSolver::redundant(Lit l, int &frame) {
  CRef r = reason_[l.var()];
  if (r == kNoReason)
    return false;
  const auto &lits = clauses_[r].lits;
  int dep = clauses_[r].frame;
  for (std::size_t i = 1; i < lits.size(); ++i) {
    Var v = lits[i].var();
    if (level_[v] == 0)
      dep = std::max(dep, frame_dep_[v]);
    else if (!seen_[v])
      return false;
  }
  frame = std::max(frame, dep);
  return true;
}

std::vector<Lit> SatSolver::analyze_final(Lit p) {
  std::vector<Lit> core{p};
  if (level_[p.var()] == 0)
    return core;
  seen_[p.var()] = 1;
  for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[0]);) {
    Var v = trail_[i].var();
    if (!seen_[v])
      continue;
    if (reason_[v] == kNoReason) {
      core.push_back(trail_[i]);
    } else {
      const auto &lits = clauses_[reason_[v]].lits;
      for (std::size_t j = 1; j < lits.size(); ++j)
        if (level_[lits[j].var()] > 0)
          seen_[lits[j].var()] = 1;
    }
    seen_[v] = 0;
  }
  seen_[p.var()] = 0;
  return core;
}

void SatSolver::handle_conflict(CRef confl) {
  std::vector<Lit> learnt;
  int bt = 0, frame = 0;
  analyze(confl, learnt, bt, frame);
  if (learn_observer_)
    learn_observer_(learnt);
  cancel_until(bt);
  ++stats_.learned;
  if (learnt.size() == 1) {
    CRef c = store(std::move(learnt), frame, true, false, false);
    units_.push_back(c);
    enqueue(clauses_[c].lits[0], c);
  } else {
    CRef c = store(std::move(learnt), frame, true, false, true);
    attach(c);
    bump_clause(clauses_[c]);
    enqueue(clauses_[c].lits[0], c);
  }
  var_inc_ /= kVarDecay;
  clause_inc_ /= kClauseDecay;
}

SatSolver::LemmaEffect SatSolver::add_lemma(const Lemma &lemma, CRef &conflict) {
  check_lits(lemma.lits);
  std::vector<Lit> v = lemma.lits;
  if (!normalize(v))
    return LemmaEffect::None;
  if (v.empty())
    return LemmaEffect::Unsat;
  int frame = lemma.removable ? 0 : frame_depth_;
  std::stable_sort(v.begin(), v.end(), [&](Lit a, Lit b) {
    bool fa = value(a) == LBool::False, fb = value(b) == LBool::False;
    if (fa != fb)
      return fb;
    return fa && level_[a.var()] > level_[b.var()];
  });
  if (v.size() == 1) {
    Lit l = v[0];
    CRef c = store(std::move(v), frame, false, true, false);
    units_.push_back(c);
    if (value(l) != LBool::Undef && level_[l.var()] == 0)
      return value(l) == LBool::True ? LemmaEffect::None : LemmaEffect::Unsat;
    cancel_until(0);
    enqueue(l, c);
    return LemmaEffect::Changed;
  }
  std::size_t nonfalse = 0;
  while (nonfalse < v.size() && value(v[nonfalse]) != LBool::False)
    ++nonfalse;
  CRef c = store(std::move(v), frame, false, true, lemma.removable);
  const auto &cl = clauses_[c].lits;
  attach(c);
  if (nonfalse >= 2)
    return LemmaEffect::None;
  if (nonfalse == 1) {
    int l1 = level_[cl[1].var()];
    if (value(cl[0]) == LBool::True && level_[cl[0].var()] <= l1)
      return LemmaEffect::None;
    cancel_until(l1);
    if (value(cl[0]) == LBool::Undef)
      enqueue(cl[0], c);
    return LemmaEffect::Changed;
  }
  int l1 = level_[cl[0].var()], l2 = level_[cl[1].var()];
  if (l1 == 0)
    return LemmaEffect::Unsat;
  if (l1 > l2) {
    cancel_until(l2);
    enqueue(cl[0], c);
    return LemmaEffect::Changed;
  }
  cancel_until(l1);
  conflict = c;
  return LemmaEffect::Conflict;
}

bool SatSolver::apply_hook(const HookResult &r, bool &changed) {
  for (const auto &lemma : r.lemmas) {
    ++stats_.lemmas;
    CRef confl = kNoReason;
    switch (add_lemma(lemma, confl)) {
    case LemmaEffect::None:
      break;
    case LemmaEffect::Changed:
      changed = true;
      break;
    case LemmaEffect::Unsat:
      mark_unsat();
      return false;
    case LemmaEffect::Conflict:
      changed = true;
      ++stats_.conflicts;
      handle_conflict(confl);
      break;
    }
  }
  return true;
}

Lit SatSolver::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (assigns_[v] == LBool::Undef)
      return Lit::make(v, phase_[v]);
  }
  return Lit{};
}

void SatSolver::bump_var(Var v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto &a : activity_)
      a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v))
    heap_up(heap_index_[v]);
}

void SatSolver::bump_clause(ClauseData &c) {
  c.activity += clause_inc_;
  if (c.activity > 1e20) {
    for (auto &d : clauses_)
      d.activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

int SatSolver::compute_lbd(std::span<const Lit> lits) {
  std::vector<int> levels;
  levels.reserve(lits.size());
  for (Lit l : lits)
    levels.push_back(value(l) == LBool::Undef ? -1 : level_[l.var()]);
  std::sort(levels.begin(), levels.end());
  return static_cast<int>(std::unique(levels.begin(), levels.end()) - levels.begin());
}

bool SatSolver::locked(CRef c) const {
  Lit l = clauses_[c].lits[0];
  return value(l) == LBool::True && reason_[l.var()] == c;
}

void SatSolver::reduce_db() {
  ++reduce_rounds_;
  next_reduce_ = stats_.conflicts + 2000 + 300 * reduce_rounds_;
  std::vector<CRef> cands;
  for (CRef c = 0; c < static_cast<CRef>(clauses_.size()); ++c) {
    const auto &d = clauses_[c];
    if (!d.removed && d.removable && d.lits.size() > 2 && d.lbd > 2 && !locked(c))
      cands.push_back(c);
  }
  std::sort(cands.begin(), cands.end(), [&](CRef a, CRef b) {
    const auto &x = clauses_[a], &y = clauses_[b];
    if (x.lbd != y.lbd)
      return x.lbd > y.lbd;
    if (x.activity != y.activity)
      return x.activity < y.activity;
    return a < b;
  });
  for (std::size_t i = 0; i < cands.size() / 2; ++i)
    clauses_[cands[i]].removed = true;
  sweep_watches();
}

void SatSolver::heap_insert(Var v) {
  if (heap_contains(v))
    return;
  heap_index_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_index_[v]);
}

namespace {

bool before(const std::vector<double> &act, Var a, Var b) {
  return act[a] > act[b] || (act[a] == act[b] && a < b);
}

} // namespace

void SatSolver::heap_up(int i) {
  Var v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) / 2;
    if (!before(activity_, v, heap_[parent]))
      break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

void SatSolver::heap_down(int i) {
  Var v = heap_[i];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n)
      break;
    if (child + 1 < n && before(activity_, heap_[child + 1], heap_[child]))
      ++child;
    if (!before(activity_, heap_[child], v))
      break;
    heap_[i] = heap_[child];
    heap_index_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

Var SatSolver::heap_pop() {
  Var top = heap_[0];
  heap_index_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[last] = 0;
    heap_down(0);
  }
  return top;
}

} // namespace optsmt::sat
