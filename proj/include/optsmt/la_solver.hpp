#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "optsmt/delta_rational.hpp"
#include "optsmt/formula.hpp"

namespace optsmt {

/// Result of minimizing a variable over the asserted constraints.
struct MinResult {
  bool unbounded = false;
  /// Infimum of the cost; its ε-coefficient is always zero.
  DeltaRational value;
  /// The infimum is reached by some point (as opposed to approached).
  bool attained = false;
  /// Symbolic point reaching the optimum of the ε-extended problem; its cost
  /// equals `value` exactly when attained. Empty when unbounded.
  std::vector<DeltaRational> witness;
};

struct LaStats {
  uint64_t checks = 0;
  uint64_t pivots = 0;
  uint64_t minimize_calls = 0;
};

/// Incremental simplex for conjunctions of LA(Q) literals over ε-extended
/// bounds. Variables 0..n-1 are the problem variables; one slack variable is
/// added per distinct multi-variable term. Pivoting follows Bland's rule.
class LaSolver {
public:
  using Explanation = std::vector<Literal>;
  using Mark = std::size_t;

  explicit LaSolver(std::size_t num_vars = 0);

  VarId add_var();
  std::size_t num_vars() const { return num_user_vars_; }

  /// Associates proposition `p` with `atom`. Re-registering the same pair
  /// is a no-op; a different atom for a known `p` throws std::logic_error.
  void register_atom(PropId p, const Atom &atom);
  bool is_registered(PropId p) const;

  /// Asserts the bound(s) a literal denotes. On conflict returns an
  /// explanation containing `lit` and leaves the state unchanged. Throws
  /// std::logic_error for unregistered atoms and for negated equalities.
  std::optional<Explanation> assert_literal(Literal lit);

  /// Restores feasibility of all rows. False means unsatisfiable; see
  /// explanation().
  bool check();
  const Explanation &explanation() const { return explanation_; }

  Mark mark() const { return trail_.size(); }
  /// Retracts every assertion made after `m`. Throws std::logic_error for a
  /// mark beyond the current trail.
  void backtrack_to(Mark m);

  /// Registered atoms not currently asserted whose truth value follows from
  /// a single asserted bound on the same term (two for equalities). Only
  /// terms whose bounds changed since the previous call are scanned.
  std::vector<std::pair<Literal, Explanation>> theory_propagate();

  /// Valuation of the problem variables. Valid after check() returned true.
  std::vector<DeltaRational> model() const;
  const DeltaRational &value(VarId v) const { return beta_[v]; }

  /// Minimizes variable `cost` from the current feasible state. Moves the
  /// valuation to the optimum; bounds are untouched. Throws std::logic_error
  /// if the last check() did not succeed.
  MinResult minimize(VarId cost);

  /// Rows hold, and every variable lies within its bounds.
  bool consistent() const;

  const LaStats &stats() const { return stats_; }

private:
  struct Bound {
    DeltaRational value;
    Literal lit;
  };
  struct Row {
    int basic;
    std::vector<std::pair<int, Rational>> entries; // sorted by variable
  };
  struct TrailEntry {
    int var;
    bool upper;
    std::optional<Bound> old;
    PropId prop; // -1 unless this entry marks a literal as asserted
  };
  struct AtomInfo {
    int var;
    Rational k; // the atom reads  var rel k
    Rel rel;
  };

  int new_column();
  int term_var(const LinTerm &homogeneous);
  std::optional<Explanation> assert_upper(int x, const DeltaRational &c, Literal lit);
  std::optional<Explanation> assert_lower(int x, const DeltaRational &c, Literal lit);
  void set_bound(int x, bool upper, Bound b);
  void update(int x, const DeltaRational &v);
  void pivot(int row_index, int entering);
  void pivot_and_update(int row_index, int entering, const DeltaRational &v);
  bool below_upper(int x) const { return !upper_[x] || beta_[x] < upper_[x]->value; }
  bool above_lower(int x) const { return !lower_[x] || beta_[x] > lower_[x]->value; }
  static void add_scaled(std::vector<std::pair<int, Rational>> &dst,
                         const std::vector<std::pair<int, Rational>> &src, const Rational &k, int skip);

  std::size_t num_user_vars_ = 0;
  std::vector<std::optional<Bound>> lower_, upper_;
  std::vector<DeltaRational> beta_;
  std::vector<int> row_of_; // -1 for nonbasic
  std::vector<Row> rows_;
  std::map<LinTerm, int> slack_of_;
  std::map<PropId, AtomInfo> atoms_;
  std::vector<std::vector<PropId>> atoms_on_;
  std::map<PropId, bool> asserted_;
  std::vector<TrailEntry> trail_;
  std::vector<char> touched_;
  std::vector<int> touched_list_;
  Explanation explanation_;
  bool last_check_ok_ = true;
  LaStats stats_;
};

/// Minimizes `cost` over the conjunction of `lits` (theory literals of
/// `props`) in a scratch solver; nullopt if the conjunction is unsatisfiable.
std::optional<MinResult> minimize_conjunction(const PropTable &props, std::size_t num_vars,
                                              const std::vector<Literal> &lits, VarId cost);

/// Largest `max` such that η ∧ (cost < max) is unsatisfiable, i.e. the
/// infimum of cost subject to η; nullopt stands for +∞ (η alone is
/// unsatisfiable). Throws std::logic_error when η ∧ (cost < pivot) is
/// satisfiable.
std::optional<Rational> maximize_conflict_bound(const PropTable &props, std::size_t num_vars,
                                                const std::vector<Literal> &eta, VarId cost,
                                                const Rational &pivot);

} // namespace optsmt
