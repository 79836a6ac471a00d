#pragma once

// Independent reference computations shared by the test binaries.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "optsmt/encodings.hpp"
#include "optsmt/formula.hpp"
#include "optsmt/omt.hpp"
#include "optsmt/script.hpp"

namespace testsupport {

using namespace optsmt;

/// Integer in [lo, hi].
int64_t uniform_int(std::mt19937_64 &rng, int64_t lo, int64_t hi);

/// Random constraint Σ c_i x_i ⋄ k over `nvars` variables with integer
/// coefficients in [-coeff, coeff] (at least one nonzero), ⋄ drawn from
/// {≤, <, =, ≥, >} (plus ≠ when `allow_ne`).
struct RawConstraint {
  LinTerm term;
  RawRel rel;
};
RawConstraint random_constraint(std::mt19937_64 &rng, int nvars, int coeff, int constant_range,
                                bool allow_ne);

/// Atom equivalent to a theory literal; negated equalities are rejected.
Atom literal_atom(const PropTable &props, Literal lit);

/// Random conjunction of theory literals over `nvars` variables, without
/// negated equalities. With `box`, every variable gets both a lower and an
/// upper bound in [-8, 8] so the region is bounded.
struct Conjunction {
  PropTable props;
  std::vector<Literal> lits;
  std::vector<Atom> atoms() const;
};
Conjunction random_conjunction(std::mt19937_64 &rng, int nvars, int natoms, bool box);

/// Random small OMT instance: ≤ 8 Booleans, ≤ 4 rational variables
/// (variable 0 is the cost), ≤ 12 atoms, integer coefficients in [-4, 4],
/// both bounds in about half of the instances. Deterministic in `seed`;
/// the result is within the oracle's enumeration guard.
Script random_script(uint64_t seed);
OmtProblem random_problem(uint64_t seed);

/// Clauses in DIMACS convention (±(var+1)).
using IntClauses = std::vector<std::vector<int>>;
bool clauses_hold(const IntClauses &clauses, const std::vector<bool> &assignment);
/// Exhaustive satisfiability over `nvars` variables with optional fixed
/// literals.
bool brute_force_sat(int nvars, const IntClauses &clauses, const std::vector<int> &fixed = {});

/// Minimal strip length over every disjunct selection, each solved as a
/// longest-path problem; nullopt if nothing fits within `ub`.
std::optional<Rational> strip_packing_oracle(const StripPackingInstance &inst, const Rational &ub);
/// Rectangles (upper-left corners x, y) are inside the strip, pairwise
/// non-overlapping, and `length` is the rightmost edge.
bool placement_valid(const StripPackingInstance &inst, const std::vector<Rational> &x,
                     const std::vector<Rational> &y, const Rational &length);

/// Minimal makespan over every precedence selection, each solved as a
/// longest-path problem.
Rational jobshop_oracle(const JobShopInstance &inst);
bool schedule_valid(const JobShopInstance &inst, const std::vector<Rational> &start,
                    const Rational &makespan);

/// Value of the variable called `name` in `values`.
Rational value_of(const OmtProblem &p, const std::vector<Rational> &values, const std::string &name);

} // namespace testsupport
