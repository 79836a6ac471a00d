#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace optsmt::sat {

using Var = int32_t;

/// Literal encoded as 2·var + sign, sign = 1 for the negative literal.
struct Lit {
  int32_t code = -2;

  static Lit make(Var v, bool negative = false) { return Lit{2 * v + (negative ? 1 : 0)}; }
  Var var() const { return code >> 1; }
  bool negative() const { return code & 1; }
  bool undef() const { return code < 0; }
  Lit operator~() const { return Lit{code ^ 1}; }
  friend bool operator==(Lit, Lit) = default;
  friend auto operator<=>(Lit, Lit) = default;
};

enum class LBool : uint8_t { False = 0, True = 1, Undef = 2 };

inline LBool operator^(LBool b, bool flip) {
  if (b == LBool::Undef)
    return b;
  return static_cast<LBool>(static_cast<uint8_t>(b) ^ static_cast<uint8_t>(flip));
}

/// Clause supplied by a theory hook during search. Removable lemmas may be
/// discarded by clause-database reduction; irremovable ones are permanent
/// members of the current frame.
struct Lemma {
  std::vector<Lit> lits;
  bool removable = true;
};

struct HookResult {
  std::vector<Lemma> lemmas;
  /// Ends the search; solve() then reports Unsat with `stopped` set.
  bool stop = false;
};

class SatSolver;

/// Extension points used by the lazy SMT integration. All are optional.
class TheoryHooks {
public:
  virtual ~TheoryHooks() = default;
  /// BCP reached a fixpoint without conflict (early pruning point).
  virtual HookResult on_partial_assignment(SatSolver &) { return {}; }
  /// Every variable is assigned. Returning no lemmas accepts the model.
  virtual HookResult on_complete_assignment(SatSolver &) { return {}; }
  /// The trail was cut to `trail_size` literals, keeping decision levels
  /// up to `level` (-1: everything, including level 0, was unassigned).
  virtual void on_backtrack(SatSolver &, int /*level*/, std::size_t /*trail_size*/) {}
  /// Asked before the solver picks its own decision literal.
  virtual std::optional<Lit> suggest_decision(SatSolver &) { return std::nullopt; }
  /// Polled between conflicts; true aborts the search.
  virtual bool should_interrupt() { return false; }
};

enum class SolveStatus { Sat, Unsat, Interrupted };

struct SolveResult {
  SolveStatus status = SolveStatus::Unsat;
  /// For Unsat: assumptions that together with the clauses are unsatisfiable.
  std::vector<Lit> core;
  /// Unsat because a hook requested the stop.
  bool stopped = false;
};

struct SatStats {
  uint64_t decisions = 0;
  uint64_t conflicts = 0;
  uint64_t propagations = 0;
  uint64_t restarts = 0;
  uint64_t learned = 0;
  uint64_t lemmas = 0;
};

/// Incremental CDCL solver: two-watched-literal propagation, first-UIP
/// learning, VSIDS with phase saving, Luby restarts, solving under
/// assumptions with core extraction, and a frame stack for clauses.
class SatSolver {
public:
  SatSolver();

  Var new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }

  /// Adds a clause to the current frame. Tautologies are dropped and
  /// duplicate literals merged; an empty clause makes the solver UNSAT until
  /// the frame is popped. Throws std::out_of_range for unknown variables.
  void add_clause(std::span<const Lit> lits);
  void add_clause(std::initializer_list<Lit> lits) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  void push_frame();
  /// Removes the clauses of the top frame and every learned clause derived
  /// from them. Throws std::logic_error when no frame is open.
  void pop_frame();
  int frame_depth() const { return frame_depth_; }

  SolveResult solve(std::span<const Lit> assumptions = {}, TheoryHooks *hooks = nullptr);

  LBool value(Var v) const { return assigns_[v]; }
  LBool value(Lit l) const { return assigns_[l.var()] ^ l.negative(); }
  int level(Var v) const { return level_[v]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  std::span<const Lit> trail() const { return trail_; }
  /// Assignment after a Sat answer; unassigned variables read as false.
  std::vector<bool> model() const;

  const SatStats &stats() const { return stats_; }
  void set_restarts(bool enabled) { restarts_enabled_ = enabled; }
  /// Gives the current variables small pseudo-random initial activities.
  void perturb_order(uint64_t seed);
  /// Called with each learned clause before backjumping (asserting literal
  /// first), while the trail still holds the conflict state.
  void set_learn_observer(std::function<void(std::span<const Lit>)> f) {
    learn_observer_ = std::move(f);
  }
  /// Currently stored learned clauses (excludes hook lemmas).
  std::vector<std::vector<Lit>> learned_clauses() const;

private:
  using CRef = int32_t;
  static constexpr CRef kNoReason = -1;

  struct ClauseData {
    std::vector<Lit> lits;
    int frame = 0;
    int lbd = 0;
    double activity = 0;
    bool learnt = false;
    bool lemma = false;
    bool removable = false;
    bool removed = false;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };
  enum class LemmaEffect { None, Changed, Conflict, Unsat };
  enum class Outcome { Sat, Unsat, Interrupted, Restart };

  void check_lits(std::span<const Lit> lits) const;
  bool normalize(std::vector<Lit> &lits) const;
  CRef store(std::vector<Lit> lits, int frame, bool learnt, bool lemma, bool removable);
  void attach(CRef c);
  void sweep_watches();
  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }
  void cancel_until(int level);
  void notify_backtrack();
  void full_reset();
  void replay_units();
  Outcome search(uint64_t budget, SolveResult &res);
  void analyze(CRef confl, std::vector<Lit> &out, int &bt_level, int &frame);
  bool redundant(Lit l, int &frame);
  std::vector<Lit> analyze_final(Lit falsified_assumption);
  void handle_conflict(CRef confl);
  LemmaEffect add_lemma(const Lemma &lemma, CRef &conflict);
  /// Returns false if the solver became UNSAT at level 0.
  bool apply_hook(const HookResult &r, bool &changed);
  Lit pick_branch();
  void bump_var(Var v);
  void bump_clause(ClauseData &c);
  void reduce_db();
  int compute_lbd(std::span<const Lit> lits);
  bool locked(CRef c) const;
  void mark_unsat() { unsat_frame_ = unsat_frame_ < 0 ? frame_depth_ : std::min(unsat_frame_, frame_depth_); }
  bool unsat_flagged() const { return unsat_frame_ >= 0; }

  // variable heap ordered by activity
  void heap_insert(Var v);
  void heap_up(int i);
  void heap_down(int i);
  Var heap_pop();
  bool heap_contains(Var v) const { return heap_index_[v] >= 0; }

  std::vector<ClauseData> clauses_;
  std::vector<CRef> free_;
  std::vector<CRef> units_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<LBool> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<int> frame_dep_;
  std::vector<char> seen_;
  std::vector<char> phase_;
  std::vector<double> activity_;
  std::vector<Var> heap_;
  std::vector<int> heap_index_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  int frame_depth_ = 0;
  int unsat_frame_ = -1;
  bool needs_replay_ = false;
  bool restarts_enabled_ = true;
  uint64_t next_reduce_ = 2000;
  uint64_t reduce_rounds_ = 0;

  TheoryHooks *hooks_ = nullptr;
  std::vector<Lit> assumptions_;
  bool pending_notify_ = false;
  int pending_level_ = 0;
  std::size_t pending_trail_ = 0;

  SatStats stats_;
  std::function<void(std::span<const Lit>)> learn_observer_;
};

} // namespace optsmt::sat
