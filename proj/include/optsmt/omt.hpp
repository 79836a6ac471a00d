#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optsmt/formula.hpp"

namespace optsmt {

enum class Schema { Offline, Inline };

/// BinaryAlways never returns to linear search; it exists to exhibit
/// non-termination and is not meant for regular use.
enum class SearchMode { Linear, BinaryMixed, BinaryAlways };

struct OmtConfig {
  Schema schema = Schema::Inline;
  SearchMode search = SearchMode::BinaryMixed;
  bool pure_literal_filtering = true;
  bool early_pruning = true;
  /// Inline only: widen the bound learned from a conflict blaming the pivot.
  bool conflict_generalization = true;
  std::optional<std::chrono::milliseconds> timeout;
  /// Stop with Interrupted after this many search-loop iterations.
  std::optional<uint64_t> max_iterations;
  /// Nonzero seeds perturb the initial decision order.
  uint64_t seed = 0;
};

enum class OmtStatus { Optimum, Unsat, Unbounded, Interrupted };

struct OmtStats {
  uint64_t iterations = 0;
  uint64_t pivots = 0;
  uint64_t sat_iterations = 0;
  uint64_t unsat_iterations = 0;
  uint64_t decisions = 0;
  uint64_t conflicts = 0;
  uint64_t theory_checks = 0;
  uint64_t minimize_calls = 0;
  uint64_t simplex_pivots = 0;
  /// Successive values of the lower / upper end of the cost range; the
  /// first entry is the initial bound when finite.
  std::vector<Rational> l_trace;
  std::vector<Rational> u_trace;
};

struct OmtOutcome {
  OmtStatus status = OmtStatus::Unsat;
  /// Optimum; for Unsat the given ub; for Interrupted the best bound found.
  std::optional<Rational> value;
  bool attained = false;
  /// ε-extended valuation of the problem variables reaching `value`.
  std::vector<DeltaRational> witness;
  /// Truth values of the propositions in the witness model.
  std::vector<bool> assignment;
  OmtStats stats;
};

/// Current cost range [l, u[ as seen by the pivoting rule; nullopt is
/// infinite. `iteration` counts loop iterations from 1.
struct SearchState {
  std::optional<Rational> l;
  std::optional<Rational> u;
  uint64_t iteration = 1;
};

/// (l + u) / 2. Throws std::invalid_argument if a bound is infinite or
/// l >= u.
Rational compute_pivot(const std::optional<Rational> &l, const std::optional<Rational> &u);

/// Whether the next iteration pivots. False for infinite bounds, an empty
/// open interval, or linear search; binary-mixed alternates on the
/// iteration number starting with true.
bool bin_search_mode(const SearchState &state, const OmtConfig &config);

OmtOutcome solve_offline(const OmtProblem &problem, const OmtConfig &config);
OmtOutcome solve_inline(const OmtProblem &problem, const OmtConfig &config);
/// Dispatches on config.schema.
OmtOutcome solve(const OmtProblem &problem, const OmtConfig &config);

/// Concrete rational model: ε in the witness is replaced by half of the
/// largest value that preserves the truth of every atom and of the bounds.
std::vector<Rational> concrete_model(const OmtProblem &problem, const OmtOutcome &outcome);

/// True iff `values` with the outcome's proposition assignment satisfies
/// every clause and the bounds; atoms are evaluated on `values`.
bool satisfies_problem(const OmtProblem &problem, const std::vector<bool> &assignment,
                       const std::vector<Rational> &values);

struct CrosscheckResult {
  bool pass = false;
  std::string reason;
};

/// Re-derives the outcome with a fresh decision-only solver. Optimum m:
/// attained needs φ∧(cost<m) unsat and φ∧(cost=m) sat; strict needs
/// φ∧(cost≤m) unsat and φ∧(cost=m+ε′) sat. Unsat outcomes need φ within
/// the bounds unsat.
CrosscheckResult crosscheck(const OmtProblem &problem, const OmtOutcome &outcome);

/// Satisfiability of φ within [lb, ub[ plus extra unit atoms, by a fresh
/// SMT instance.
bool smt_satisfiable(const OmtProblem &problem, const std::vector<std::pair<Atom, bool>> &units);

std::string to_string(OmtStatus s);
std::string to_string(Schema s);
std::string to_string(SearchMode s);

} // namespace optsmt
