#pragma once

#include <span>
#include <vector>

#include "optsmt/formula.hpp"
#include "optsmt/omt.hpp"

namespace optsmt {

/// `term < 0` when strict, `term <= 0` otherwise.
struct FmConstraint {
  LinTerm term;
  bool strict = false;
  friend auto operator<=>(const FmConstraint &, const FmConstraint &) = default;
};

struct FmResult {
  enum class Status { Infeasible, Unbounded, Bounded };
  Status status = Status::Infeasible;
  Rational value;
  bool attained = false;
};

inline constexpr std::size_t kFmMaxVars = 8;
inline constexpr std::size_t kFmMaxAtoms = 64;

/// Inequalities equivalent to the conjunction of `atoms`; an equality
/// contributes two.
std::vector<FmConstraint> fm_constraints(std::span<const Atom> atoms);

/// One Fourier–Motzkin step: a system over the remaining variables that is
/// satisfiable iff `system` is. Exact duplicates are merged; ground
/// constraints vanish, or collapse to a single `1 <= 0`.
std::vector<FmConstraint> fm_eliminate(const std::vector<FmConstraint> &system, VarId v);

/// Infimum of `objective` over the conjunction of `atoms`. Throws
/// std::length_error beyond kFmMaxVars variables or kFmMaxAtoms atoms.
FmResult fm_minimize(std::span<const Atom> atoms, VarId objective);

/// Enumeration guard: at most this many non-label propositions.
inline constexpr std::size_t kOracleMaxProps = 20;

/// Reference OMT answer by exhaustion: every truth assignment of the atoms
/// that extends to a model of the clauses is minimized with fm_minimize.
/// Only status, value and attained are filled. Throws std::length_error
/// beyond the guards.
OmtOutcome oracle_solve(const OmtProblem &problem);

} // namespace optsmt
