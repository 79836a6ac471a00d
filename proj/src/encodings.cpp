#include "optsmt/encodings.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace optsmt {

uint64_t SplitMix64::next() {
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rational SplitMix64::uniform() {
  uint64_t k = next() >> 11;
  mpq_class q(mpz_class(std::to_string(k + 1)), mpz_class(1));
  q /= mpq_class(mpz_class(1) << 53);
  return Rational(q);
}

namespace {

Expr constraint(PropTable &props, const LinTerm &lhs, RawRel rel, const Rational &rhs) {
  LinTerm t = lhs;
  t.add_constant(-rhs);
  if (t.is_constant())
    return Expr::constant(eval_ground(t.constant(), rel));
  NormalizedAtom n = normalize_atom(t, rel);
  return Expr::literal({props.intern_atom(n.atom), n.positive});
}

LinTerm row_term(const LinearRow &row, std::span<const VarId> x) {
  if (row.coeffs.size() != x.size())
    throw std::invalid_argument("row width does not match the variable count");
  LinTerm t;
  for (std::size_t i = 0; i < x.size(); ++i)
    t.add(x[i], row.coeffs[i]);
  return t;
}

Expr row_ge(PropTable &props, const LinearRow &row, std::span<const VarId> x) {
  return constraint(props, row_term(row, x), RawRel::GE, row.rhs);
}

Expr system_ge(PropTable &props, const std::vector<LinearRow> &rows, std::span<const VarId> x) {
  std::vector<Expr> parts;
  for (const LinearRow &r : rows)
    parts.push_back(row_ge(props, r, x));
  return Expr::land(std::move(parts));
}

LinTerm var(VarId v) { return LinTerm::variable(v); }

} // namespace

Expr encode_ldp(const std::vector<std::vector<LinearRow>> &systems, std::span<const VarId> x,
                PropTable &props) {
  if (systems.empty())
    throw std::invalid_argument("encode_ldp: no systems");
  std::vector<Expr> disjuncts;
  for (const auto &sys : systems)
    disjuncts.push_back(system_ge(props, sys, x));
  return Expr::lor(std::move(disjuncts));
}

Expr encode_ldp(const std::vector<LinearRow> &shared,
                const std::vector<std::vector<LinearRow>> &groups, std::span<const VarId> x,
                PropTable &props) {
  if (shared.empty() && groups.empty())
    throw std::invalid_argument("encode_ldp: no constraints");
  std::vector<Expr> parts{system_ge(props, shared, x)};
  for (const auto &g : groups) {
    std::vector<Expr> alts;
    for (const LinearRow &r : g)
      alts.push_back(row_ge(props, r, x));
    parts.push_back(Expr::lor(std::move(alts)));
  }
  return Expr::land(std::move(parts));
}

Script lgdp_script(const LgdpModel &m) {
  const std::size_t n = m.upper.size();
  if (m.cost_weights.size() != n)
    throw std::invalid_argument("lgdp: cost weights do not match the variable count");
  Script s;
  std::vector<VarId> x;
  for (std::size_t i = 0; i < n; ++i)
    x.push_back(s.vars.add("x" + std::to_string(i)));
  std::vector<VarId> z;
  std::vector<std::vector<PropId>> labels;
  for (std::size_t k = 0; k < m.disjunctions.size(); ++k) {
    if (m.disjunctions[k].size() < 2)
      throw std::invalid_argument("lgdp: a disjunction needs at least two disjuncts");
    z.push_back(s.vars.add("z" + std::to_string(k)));
    labels.emplace_back();
    for (std::size_t j = 0; j < m.disjunctions[k].size(); ++j)
      labels.back().push_back(s.props.add_bool("Y_" + std::to_string(j) + "_" + std::to_string(k)));
  }
  VarId cost = s.vars.add("cost");
  s.cost = cost;

  LinTerm objective;
  for (VarId zk : z)
    objective.add(zk, Rational(1));
  for (std::size_t i = 0; i < n; ++i)
    objective.add(x[i], m.cost_weights[i]);
  s.assertions.push_back(constraint(s.props, var(cost) - objective, RawRel::EQ, Rational(0)));

  for (const LinearRow &r : m.global)
    s.assertions.push_back(constraint(s.props, row_term(r, x), RawRel::LE, r.rhs));

  for (const auto &clause : m.logic) {
    std::vector<Expr> lits;
    for (const LgdpLabel &l : clause) {
      if (l.disjunction >= labels.size() || l.disjunct >= labels[l.disjunction].size())
        throw std::invalid_argument("lgdp: unknown label");
      lits.push_back(Expr::literal({labels[l.disjunction][l.disjunct], l.positive}));
    }
    s.assertions.push_back(Expr::lor(std::move(lits)));
  }

  for (std::size_t i = 0; i < n; ++i) {
    s.assertions.push_back(constraint(s.props, var(x[i]), RawRel::GE, Rational(0)));
    s.assertions.push_back(constraint(s.props, var(x[i]), RawRel::LE, m.upper[i]));
  }

  for (std::size_t k = 0; k < m.disjunctions.size(); ++k) {
    std::vector<Expr> alts;
    for (std::size_t j = 0; j < m.disjunctions[k].size(); ++j) {
      const LgdpDisjunct &d = m.disjunctions[k][j];
      alts.push_back(Expr::land({Expr::prop(labels[k][j]), system_ge(s.props, d.rows, x),
                                 constraint(s.props, var(z[k]), RawRel::EQ, d.charge)}));
    }
    s.assertions.push_back(Expr::lor(std::move(alts)));
  }
  return s;
}

OmtProblem encode_lgdp(const LgdpModel &m) { return to_problem(lgdp_script(m)); }

Script pb_script(const PbModel &m) {
  Script s;
  std::vector<PropId> bools;
  for (std::size_t i = 0; i < m.num_bools; ++i)
    bools.push_back(s.props.add_bool("X" + std::to_string(i)));
  VarId cost = s.vars.add("cost");
  s.cost = cost;
  LinTerm sum;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    const auto &[b, a] = m.weights[i];
    if (b >= m.num_bools)
      throw std::invalid_argument("pb: unknown Boolean variable");
    if (a.sign() < 0)
      throw std::invalid_argument("pb: negative weight");
    VarId xi = s.vars.add("w" + std::to_string(i));
    sum.add(xi, Rational(1));
    Expr on = Expr::prop(bools[b]);
    s.assertions.push_back(Expr::lor({Expr::lnot(on), constraint(s.props, var(xi), RawRel::EQ, a)}));
    s.assertions.push_back(Expr::lor({on, constraint(s.props, var(xi), RawRel::EQ, Rational(0))}));
    s.assertions.push_back(constraint(s.props, var(xi), RawRel::GE, Rational(0)));
    s.assertions.push_back(constraint(s.props, var(xi), RawRel::LE, a));
  }
  s.assertions.push_back(constraint(s.props, var(cost) - sum, RawRel::EQ, Rational(0)));
  for (const auto &clause : m.hard) {
    std::vector<Expr> lits;
    for (const PbLiteral &l : clause) {
      if (l.var >= m.num_bools)
        throw std::invalid_argument("pb: unknown Boolean variable");
      lits.push_back(Expr::literal({bools[l.var], l.positive}));
    }
    s.assertions.push_back(Expr::lor(std::move(lits)));
  }
  return s;
}

OmtProblem encode_pb(const PbModel &m) { return to_problem(pb_script(m)); }

Rational strip_ub_heuristic(const StripPackingInstance &inst) {
  const std::size_t n = inst.length.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t j : order)
    if (inst.height[j] > inst.width)
      throw std::invalid_argument("strip_ub_heuristic: rectangle taller than the strip");
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return inst.height[a] > inst.height[b]; });
  Rational total, column_length, column_height;
  bool open = false;
  for (std::size_t j : order) {
    if (open && column_height + inst.height[j] > inst.width) {
      total += column_length;
      open = false;
    }
    if (!open) {
      column_length = Rational(0);
      column_height = Rational(0);
      open = true;
    }
    column_height += inst.height[j];
    column_length = max(column_length, inst.length[j]);
  }
  if (open)
    total += column_length;
  return total;
}

StripPacking strip_packing(const StripPackingInstance &inst) {
  const std::size_t n = inst.length.size();
  if (inst.height.size() != n)
    throw std::invalid_argument("strip_packing: length/height count mismatch");
  StripPacking out;
  out.instance = inst;
  out.ub = strip_ub_heuristic(inst);
  Script &s = out.script;
  s.comments = {"strip-packing n=" + std::to_string(n) + " w=" + inst.width.to_string(),
                "seed " + std::to_string(inst.seed), "heuristic-ub " + out.ub.to_string()};
  std::vector<VarId> x, y;
  for (std::size_t j = 0; j < n; ++j) {
    x.push_back(s.vars.add("x" + std::to_string(j)));
    y.push_back(s.vars.add("y" + std::to_string(j)));
  }
  VarId len = s.vars.add("L");
  s.cost = len;
  s.lb = Rational(0);
  auto add = [&](const LinTerm &t, RawRel rel, const Rational &rhs) {
    s.assertions.push_back(constraint(s.props, t, rel, rhs));
  };
  add(var(len), RawRel::LE, out.ub);
  for (std::size_t j = 0; j < n; ++j) {
    add(var(len) - var(x[j]), RawRel::GE, inst.length[j]);
    add(var(y[j]), RawRel::LE, inst.width);
    add(var(y[j]), RawRel::GE, inst.height[j]);
    add(var(x[j]), RawRel::LE, out.ub - inst.length[j]);
    add(var(x[j]), RawRel::GE, Rational(0));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s.assertions.push_back(Expr::lor({
          constraint(s.props, var(x[j]) - var(x[i]), RawRel::GE, inst.length[i]),
          constraint(s.props, var(x[i]) - var(x[j]), RawRel::GE, inst.length[j]),
          constraint(s.props, var(y[i]) - var(y[j]), RawRel::GE, inst.height[i]),
          constraint(s.props, var(y[j]) - var(y[i]), RawRel::GE, inst.height[j]),
      }));
  out.problem = to_problem(s);
  return out;
}

StripPacking gen_strip_packing(std::size_t n, const Rational &w, uint64_t seed) {
  if (n == 0 || w.sign() <= 0)
    throw std::invalid_argument("gen_strip_packing: need n >= 1 and w > 0");
  SplitMix64 rng(seed);
  StripPackingInstance inst;
  inst.width = w;
  inst.seed = seed;
  for (std::size_t j = 0; j < n; ++j) {
    inst.length.push_back(rng.uniform());
    Rational h = rng.uniform();
    while (h > w)
      h = rng.uniform();
    inst.height.push_back(h);
  }
  return strip_packing(inst);
}

JobShop jobshop(const JobShopInstance &inst) {
  const std::size_t jobs = inst.time.size();
  JobShop out;
  out.instance = inst;
  Script &s = out.script;
  std::size_t stages = jobs ? inst.time[0].size() : 0;
  for (const auto &row : inst.time)
    if (row.size() != stages)
      throw std::invalid_argument("jobshop: ragged processing-time table");
  s.comments = {"jobshop jobs=" + std::to_string(jobs) + " stages=" + std::to_string(stages),
                "seed " + std::to_string(inst.seed)};
  std::vector<VarId> start;
  for (std::size_t i = 0; i < jobs; ++i)
    start.push_back(s.vars.add("s" + std::to_string(i)));
  VarId ms = s.vars.add("ms");
  s.cost = ms;
  s.lb = Rational(0);

  // prefix[i][j]: time job i spends before entering stage j.
  std::vector<std::vector<Rational>> prefix(jobs, std::vector<Rational>(stages + 1));
  for (std::size_t i = 0; i < jobs; ++i)
    for (std::size_t j = 0; j < stages; ++j)
      prefix[i][j + 1] = prefix[i][j] + inst.time[i][j];

  for (std::size_t i = 0; i < jobs; ++i) {
    s.assertions.push_back(constraint(s.props, var(start[i]), RawRel::GE, Rational(0)));
    s.assertions.push_back(
        constraint(s.props, var(ms) - var(start[i]), RawRel::GE, prefix[i][stages]));
  }
  for (std::size_t i = 0; i < jobs; ++i)
    for (std::size_t k = i + 1; k < jobs; ++k)
      for (std::size_t j = 0; j < stages; ++j)
        s.assertions.push_back(Expr::lor({
            constraint(s.props, var(start[k]) - var(start[i]), RawRel::GE,
                       prefix[i][j + 1] - prefix[k][j]),
            constraint(s.props, var(start[i]) - var(start[k]), RawRel::GE,
                       prefix[k][j + 1] - prefix[i][j]),
        }));
  out.problem = to_problem(s);
  return out;
}

JobShop gen_jobshop(std::size_t jobs, std::size_t stages, uint64_t seed) {
  if (jobs == 0 || stages == 0)
    throw std::invalid_argument("gen_jobshop: need jobs >= 1 and stages >= 1");
  SplitMix64 rng(seed);
  JobShopInstance inst;
  inst.seed = seed;
  for (std::size_t i = 0; i < jobs; ++i) {
    inst.sampled_start.push_back(rng.uniform());
    std::vector<Rational> row;
    for (std::size_t j = 0; j < stages; ++j)
      row.push_back(rng.uniform());
    inst.time.push_back(std::move(row));
  }
  return jobshop(inst);
}

} // namespace optsmt
