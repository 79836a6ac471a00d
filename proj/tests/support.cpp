#include "support.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace testsupport {

int64_t uniform_int(std::mt19937_64 &rng, int64_t lo, int64_t hi) {
  return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

RawConstraint random_constraint(std::mt19937_64 &rng, int nvars, int coeff, int constant_range,
                                bool allow_ne) {
  LinTerm t;
  while (t.is_constant()) {
    t = LinTerm();
    for (int v = 0; v < nvars; ++v)
      if (uniform_int(rng, 0, 2) != 0)
        t.add(v, Rational(uniform_int(rng, -coeff, coeff)));
  }
  t.add_constant(Rational(uniform_int(rng, -constant_range, constant_range)));
  static constexpr RawRel rels[] = {RawRel::LE, RawRel::LT, RawRel::EQ, RawRel::GE, RawRel::GT,
                                    RawRel::NE};
  RawRel rel = rels[uniform_int(rng, 0, allow_ne ? 5 : 4)];
  return {t, rel};
}

Atom literal_atom(const PropTable &props, Literal lit) {
  const Atom &a = props.atom(lit.prop);
  if (lit.positive)
    return a;
  if (a.rel == Rel::EQ)
    throw std::logic_error("negated equality");
  // ¬(t ≤ 0) ≡ -t < 0 and ¬(t < 0) ≡ -t ≤ 0.
  return {-a.term, a.rel == Rel::LE ? Rel::LT : Rel::LE};
}

std::vector<Atom> Conjunction::atoms() const {
  std::vector<Atom> out;
  for (Literal l : lits)
    out.push_back(literal_atom(props, l));
  return out;
}

Conjunction random_conjunction(std::mt19937_64 &rng, int nvars, int natoms, bool box) {
  Conjunction c;
  auto add = [&](const LinTerm &t, RawRel rel) {
    NormalizedAtom n = normalize_atom(t, rel);
    c.lits.push_back({c.props.intern_atom(n.atom), n.positive});
  };
  for (int k = 0; k < natoms; ++k) {
    RawConstraint r = random_constraint(rng, nvars, 4, 9, false);
    add(r.term, r.rel);
  }
  if (box)
    for (int v = 0; v < nvars; ++v) {
      int64_t lo = uniform_int(rng, -8, 4);
      int64_t hi = uniform_int(rng, lo, 8);
      add(LinTerm::variable(v) - LinTerm(Rational(lo)), uniform_int(rng, 0, 3) ? RawRel::GE : RawRel::GT);
      add(LinTerm::variable(v) - LinTerm(Rational(hi)), uniform_int(rng, 0, 3) ? RawRel::LE : RawRel::LT);
    }
  return c;
}

Script random_script(uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (;;) {
    Script s;
    int nvars = static_cast<int>(uniform_int(rng, 1, 4));
    int nbools = static_cast<int>(uniform_int(rng, 0, 8));
    int natoms = static_cast<int>(uniform_int(rng, 1, 12));
    for (int v = 0; v < nvars; ++v)
      s.vars.add(v == 0 ? "cost" : "x" + std::to_string(v));
    s.cost = 0;
    std::vector<Expr> leaves;
    for (int b = 0; b < nbools; ++b)
      leaves.push_back(Expr::prop(s.props.add_bool("b" + std::to_string(b))));
    for (int a = 0; a < natoms; ++a) {
      RawConstraint c = random_constraint(rng, nvars, 4, 6, uniform_int(rng, 0, 9) == 0);
      if (uniform_int(rng, 0, 9) < 6 && c.term.coeff(0).is_zero())
        c.term.add(0, Rational(uniform_int(rng, 0, 1) ? 1 : -1));
      NormalizedAtom n = normalize_atom(c.term, c.rel);
      leaves.push_back(Expr::literal({s.props.intern_atom(n.atom), n.positive}));
    }
    auto leaf = [&] {
      Expr e = leaves[uniform_int(rng, 0, static_cast<int64_t>(leaves.size()) - 1)];
      return uniform_int(rng, 0, 2) == 0 ? Expr::lnot(e) : e;
    };
    int nclauses = static_cast<int>(uniform_int(rng, 1, 7));
    for (int c = 0; c < nclauses; ++c) {
      std::vector<Expr> items;
      int k = static_cast<int>(uniform_int(rng, 1, 3));
      for (int i = 0; i < k; ++i)
        items.push_back(uniform_int(rng, 0, 3) == 0 ? Expr::land({leaf(), leaf()}) : leaf());
      s.assertions.push_back(Expr::lor(std::move(items)));
    }
    int64_t bounds = uniform_int(rng, 0, 19);
    if (bounds < 10) {
      int64_t lb = uniform_int(rng, -10, 2);
      s.lb = Rational(lb);
      s.ub = Rational(lb + uniform_int(rng, 1, 16));
    } else if (bounds < 13) {
      s.lb = Rational(uniform_int(rng, -10, 2));
    } else if (bounds < 15) {
      s.ub = Rational(uniform_int(rng, -4, 10));
    }
    OmtProblem p = to_problem(s);
    std::size_t counted = 0;
    for (std::size_t i = 0; i < p.formula.props.size(); ++i)
      counted += p.formula.props.kind(static_cast<PropId>(i)) != PropKind::Label;
    if (counted <= 20)
      return s;
  }
}

OmtProblem random_problem(uint64_t seed) { return to_problem(random_script(seed)); }

bool clauses_hold(const IntClauses &clauses, const std::vector<bool> &assignment) {
  for (const auto &c : clauses) {
    bool sat = false;
    for (int l : c)
      if (assignment[std::abs(l) - 1] == (l > 0)) {
        sat = true;
        break;
      }
    if (!sat)
      return false;
  }
  return true;
}

bool brute_force_sat(int nvars, const IntClauses &clauses, const std::vector<int> &fixed) {
  // Truth tables: bit m of table(v) is the value of v under assignment m.
  const std::size_t bits = std::size_t(1) << nvars;
  const std::size_t words = (bits + 63) / 64;
  static constexpr uint64_t low_patterns[6] = {
      0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
      0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  auto table = [&](int lit) {
    std::vector<uint64_t> t(words);
    int v = std::abs(lit) - 1;
    for (std::size_t w = 0; w < words; ++w) {
      uint64_t word = v < 6 ? low_patterns[v] : (((w >> (v - 6)) & 1) ? ~uint64_t(0) : 0);
      t[w] = lit > 0 ? word : ~word;
    }
    return t;
  };
  std::vector<std::vector<uint64_t>> pos, neg;
  for (int v = 1; v <= nvars; ++v) {
    pos.push_back(table(v));
    neg.push_back(table(-v));
  }
  std::vector<uint64_t> all(words, ~uint64_t(0));
  if (bits < 64)
    all[0] = (uint64_t(1) << bits) - 1;
  auto lit_table = [&](int l) -> const std::vector<uint64_t> & {
    return l > 0 ? pos[l - 1] : neg[-l - 1];
  };
  for (int l : fixed)
    for (std::size_t w = 0; w < words; ++w)
      all[w] &= lit_table(l)[w];
  for (const auto &c : clauses) {
    std::vector<uint64_t> any(words, 0);
    for (int l : c)
      for (std::size_t w = 0; w < words; ++w)
        any[w] |= lit_table(l)[w];
    for (std::size_t w = 0; w < words; ++w)
      all[w] &= any[w];
  }
  for (uint64_t w : all)
    if (w)
      return true;
  return false;
}

namespace {

// Difference constraints v[to] ≥ v[from] + w over nodes 0..n-1 with
// v[i] ≥ base[i]: least solution, or nullopt on a positive cycle.
struct Edge {
  std::size_t from, to;
  Rational w;
};

std::optional<std::vector<Rational>> least_solution(std::vector<Rational> base,
                                                    const std::vector<Edge> &edges) {
  const std::size_t n = base.size();
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (const Edge &e : edges) {
      Rational cand = base[e.from] + e.w;
      if (cand > base[e.to]) {
        base[e.to] = cand;
        changed = true;
      }
    }
    if (!changed)
      return base;
  }
  return std::nullopt;
}

} // namespace

std::optional<Rational> strip_packing_oracle(const StripPackingInstance &inst, const Rational &ub) {
  const std::size_t n = inst.length.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      pairs.emplace_back(i, j);
  std::vector<Edge> xs, ys;
  std::optional<Rational> best;

  // x_i ≥ 0; y_i ≥ H_i; y_i ≤ W.
  auto evaluate = [&]() -> std::optional<Rational> {
    auto x = least_solution(std::vector<Rational>(n), xs);
    if (!x)
      return std::nullopt;
    auto y = least_solution(inst.height, ys);
    if (!y)
      return std::nullopt;
    for (std::size_t i = 0; i < n; ++i)
      if ((*y)[i] > inst.width)
        return std::nullopt;
    Rational len;
    for (std::size_t i = 0; i < n; ++i)
      len = max(len, (*x)[i] + inst.length[i]);
    if (len > ub)
      return std::nullopt;
    return len;
  };

  std::function<void(std::size_t)> dfs = [&](std::size_t k) {
    auto partial = evaluate();
    if (!partial || (best && *partial >= *best))
      return;
    if (k == pairs.size()) {
      best = partial;
      return;
    }
    auto [i, j] = pairs[k];
    xs.push_back({i, j, inst.length[i]});
    dfs(k + 1);
    xs.back() = {j, i, inst.length[j]};
    dfs(k + 1);
    xs.pop_back();
    ys.push_back({j, i, inst.height[i]});
    dfs(k + 1);
    ys.back() = {i, j, inst.height[j]};
    dfs(k + 1);
    ys.pop_back();
  };
  dfs(0);
  return best;
}

bool placement_valid(const StripPackingInstance &inst, const std::vector<Rational> &x,
                     const std::vector<Rational> &y, const Rational &length) {
  const std::size_t n = inst.length.size();
  Rational right;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].sign() < 0 || y[i] > inst.width || y[i] - inst.height[i] < Rational(0))
      return false;
    right = max(right, x[i] + inst.length[i]);
  }
  if (right != length)
    return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool apart = x[i] + inst.length[i] <= x[j] || x[j] + inst.length[j] <= x[i] ||
                   y[i] - inst.height[i] >= y[j] || y[j] - inst.height[j] >= y[i];
      if (!apart)
        return false;
    }
  return true;
}

namespace {

std::vector<std::vector<Rational>> prefixes(const JobShopInstance &inst) {
  std::vector<std::vector<Rational>> out;
  for (const auto &row : inst.time) {
    std::vector<Rational> p{Rational(0)};
    for (const Rational &t : row)
      p.push_back(p.back() + t);
    out.push_back(std::move(p));
  }
  return out;
}

} // namespace

Rational jobshop_oracle(const JobShopInstance &inst) {
  const std::size_t jobs = inst.time.size();
  const std::size_t stages = jobs ? inst.time[0].size() : 0;
  auto pre = prefixes(inst);
  struct Choice {
    std::size_t i, k, j;
  };
  std::vector<Choice> choices;
  for (std::size_t i = 0; i < jobs; ++i)
    for (std::size_t k = i + 1; k < jobs; ++k)
      for (std::size_t j = 0; j < stages; ++j)
        choices.push_back({i, k, j});
  std::optional<Rational> best;
  for (uint64_t m = 0; m < (uint64_t(1) << choices.size()); ++m) {
    std::vector<Edge> edges;
    for (std::size_t c = 0; c < choices.size(); ++c) {
      auto [i, k, j] = choices[c];
      // i leaves stage j before k enters it, or the reverse.
      if ((m >> c) & 1)
        edges.push_back({i, k, pre[i][j + 1] - pre[k][j]});
      else
        edges.push_back({k, i, pre[k][j + 1] - pre[i][j]});
    }
    auto s = least_solution(std::vector<Rational>(jobs), edges);
    if (!s)
      continue;
    Rational ms;
    for (std::size_t i = 0; i < jobs; ++i)
      ms = max(ms, (*s)[i] + pre[i][stages]);
    if (!best || ms < *best)
      best = ms;
  }
  return *best;
}

bool schedule_valid(const JobShopInstance &inst, const std::vector<Rational> &start,
                    const Rational &makespan) {
  const std::size_t jobs = inst.time.size();
  const std::size_t stages = jobs ? inst.time[0].size() : 0;
  auto pre = prefixes(inst);
  Rational last;
  for (std::size_t i = 0; i < jobs; ++i) {
    if (start[i].sign() < 0)
      return false;
    last = max(last, start[i] + pre[i][stages]);
  }
  if (last != makespan)
    return false;
  for (std::size_t i = 0; i < jobs; ++i)
    for (std::size_t k = i + 1; k < jobs; ++k)
      for (std::size_t j = 0; j < stages; ++j) {
        Rational in_i = start[i] + pre[i][j], out_i = start[i] + pre[i][j + 1];
        Rational in_k = start[k] + pre[k][j], out_k = start[k] + pre[k][j + 1];
        if (!(out_i <= in_k || out_k <= in_i))
          return false;
      }
  return true;
}

Rational value_of(const OmtProblem &p, const std::vector<Rational> &values, const std::string &name) {
  return values.at(*p.formula.vars.find(name));
}

} // namespace testsupport
