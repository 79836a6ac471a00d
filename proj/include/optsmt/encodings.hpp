#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "optsmt/expr.hpp"
#include "optsmt/formula.hpp"
#include "optsmt/script.hpp"

namespace optsmt {

/// splitmix64. uniform() draws from ]0, 1] as (k+1)/2^53 with k the top 53
/// bits of next().
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next();
  Rational uniform();

private:
  uint64_t state_;
};

/// Row `coeffs · x ≥ rhs`.
struct LinearRow {
  std::vector<Rational> coeffs;
  Rational rhs;
};

struct LgdpDisjunct {
  /// Constraint block A x ≥ a.
  std::vector<LinearRow> rows;
  /// Value taken by the disjunction's charge variable when selected.
  Rational charge;
};

struct LgdpLabel {
  std::size_t disjunction = 0;
  std::size_t disjunct = 0;
  bool positive = true;
};

/// min Σ z_k + d·x  s.t.  B x ≤ b,  0 ≤ x ≤ e,  φ over the labels, and for
/// every disjunction k one selected disjunct j with Y_jk, A_jk x ≥ a_jk and
/// z_k = c_jk.
struct LgdpModel {
  std::vector<Rational> upper;
  /// Rows of B x ≤ b, stored as coeffs·x ≤ rhs.
  std::vector<LinearRow> global;
  std::vector<std::vector<LgdpDisjunct>> disjunctions;
  /// CNF over the labels Y_jk.
  std::vector<std::vector<LgdpLabel>> logic;
  std::vector<Rational> cost_weights;
};

/// Throws std::invalid_argument on dimension mismatches or a disjunction
/// with fewer than two disjuncts.
Script lgdp_script(const LgdpModel &m);
OmtProblem encode_lgdp(const LgdpModel &m);

/// Disjunctive form: ⋁_i ⋀_j (A_ij x ≥ b_ij) over the variables `x`.
/// Throws std::invalid_argument for an empty list or a row of wrong width.
Expr encode_ldp(const std::vector<std::vector<LinearRow>> &systems, std::span<const VarId> x,
                PropTable &props);
/// Conjunctive form: ⋀_j (A_j x ≥ b_j) ∧ ⋀_t ⋁_{k ∈ I_t} (c_k x ≥ d_k).
Expr encode_ldp(const std::vector<LinearRow> &shared,
                const std::vector<std::vector<LinearRow>> &groups, std::span<const VarId> x,
                PropTable &props);

struct PbLiteral {
  std::size_t var = 0;
  bool positive = true;
};

/// min Σ a_i·X_i over Boolean variables X_0..X_{n-1} subject to hard clauses.
struct PbModel {
  std::size_t num_bools = 0;
  std::vector<std::pair<std::size_t, Rational>> weights;
  std::vector<std::vector<PbLiteral>> hard;
};

/// Throws std::invalid_argument for a negative weight or an unknown variable.
Script pb_script(const PbModel &m);
OmtProblem encode_pb(const PbModel &m);

struct StripPackingInstance {
  std::vector<Rational> length;
  std::vector<Rational> height;
  Rational width;
  uint64_t seed = 0;
};

/// Shelf heuristic: rectangles by non-increasing height are stacked in
/// columns of height at most W; the result is the summed column lengths.
/// Throws std::invalid_argument if some height exceeds the width.
Rational strip_ub_heuristic(const StripPackingInstance &inst);

struct StripPacking {
  StripPackingInstance instance;
  Rational ub;
  Script script;
  OmtProblem problem;
};

/// Encoding of a given instance; the cost variable is `L`, rectangle j has
/// upper-left corner (x<j>, y<j>).
StripPacking strip_packing(const StripPackingInstance &inst);
/// Rectangles with lengths and heights drawn uniformly from ]0, 1]; a
/// height above `w` is redrawn. Throws std::invalid_argument unless n ≥ 1
/// and w > 0.
StripPacking gen_strip_packing(std::size_t n, const Rational &w, uint64_t seed);

struct JobShopInstance {
  /// time[i][j]: processing time of job i at stage j.
  std::vector<std::vector<Rational>> time;
  /// Drawn start times; informational only, starts are decision variables.
  std::vector<Rational> sampled_start;
  uint64_t seed = 0;
};

struct JobShop {
  JobShopInstance instance;
  Script script;
  OmtProblem problem;
};

/// Zero-wait encoding; cost variable `ms`, start of job i is `s<i>`.
JobShop jobshop(const JobShopInstance &inst);
/// Throws std::invalid_argument unless jobs ≥ 1 and stages ≥ 1.
JobShop gen_jobshop(std::size_t jobs, std::size_t stages, uint64_t seed);

} // namespace optsmt
