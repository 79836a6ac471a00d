#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "optsmt/encodings.hpp"
#include "optsmt/omt.hpp"
#include "optsmt/oracle.hpp"
#include "optsmt/script.hpp"
#include "support.hpp"

using namespace optsmt;
using testsupport::uniform_int;
using testsupport::value_of;

namespace {

OmtConfig inline_binary() { return {}; }

OmtConfig offline_linear() {
  OmtConfig c;
  c.schema = Schema::Offline;
  c.search = SearchMode::Linear;
  return c;
}

LinearRow row(std::vector<int64_t> coeffs, int64_t rhs) {
  LinearRow r;
  for (int64_t c : coeffs)
    r.coeffs.emplace_back(c);
  r.rhs = Rational(rhs);
  return r;
}

// Minimizes a disjunctive system over a single variable x that is also the cost.
OmtOutcome solve_ldp(const Expr &e, Script &s, VarId x) {
  s.assertions.push_back(e);
  s.cost = x;
  return solve(to_problem(s), inline_binary());
}

} // namespace

TEST_CASE("splitmix64 reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
  SplitMix64 u(12345);
  for (int k = 0; k < 1000; ++k) {
    Rational r = u.uniform();
    CHECK(r.sign() > 0);
    CHECK(r <= Rational(1));
  }
}

TEST_CASE("lgdp examples") {
  LgdpModel m;
  m.upper = {Rational(10)};
  m.cost_weights = {Rational(0)};
  m.disjunctions = {{{{row({1}, 2)}, Rational(1)}, {{row({1}, 0)}, Rational(3)}}};
  OmtOutcome o = solve(encode_lgdp(m), inline_binary());
  CHECK(o.status == OmtStatus::Optimum);
  CHECK(o.value == Rational(1));

  // Pure LP: min x0 + x1  s.t.  -x0 - 2 x1 ≤ -3, 0 ≤ x ≤ 10.
  LgdpModel lp;
  lp.upper = {Rational(10), Rational(10)};
  lp.cost_weights = {Rational(1), Rational(1)};
  lp.global = {row({-1, -2}, -3)};
  std::vector<Atom> atoms{
      {LinTerm::variable(0) - LinTerm::variable(1) - LinTerm::variable(2), Rel::EQ},
      {LinTerm::variable(1, Rational(-1)) - LinTerm::variable(2, Rational(2)) + LinTerm(Rational(3)), Rel::LE},
      {LinTerm::variable(1, Rational(-1)), Rel::LE},
      {LinTerm::variable(2, Rational(-1)), Rel::LE},
      {LinTerm::variable(1) - LinTerm(Rational(10)), Rel::LE},
      {LinTerm::variable(2) - LinTerm(Rational(10)), Rel::LE}};
  FmResult fm = fm_minimize(atoms, 0);
  REQUIRE(fm.status == FmResult::Status::Bounded);
  CHECK(fm.value == Rational(3, 2));
  OmtOutcome lpo = solve(encode_lgdp(lp), offline_linear());
  CHECK(lpo.status == OmtStatus::Optimum);
  CHECK(lpo.value == fm.value);

  // Y_0_0 is forbidden and the other disjunct needs x ≥ 20 > e.
  LgdpModel un;
  un.upper = {Rational(10)};
  un.cost_weights = {Rational(0)};
  un.disjunctions = {{{{row({1}, 2)}, Rational(1)}, {{row({1}, 20)}, Rational(0)}}};
  un.logic = {{{0, 0, false}}};
  CHECK(solve(encode_lgdp(un), inline_binary()).status == OmtStatus::Unsat);
}

TEST_CASE("lgdp errors") {
  LgdpModel m;
  m.upper = {Rational(10)};
  m.cost_weights = {Rational(0), Rational(1)};
  CHECK_THROWS_AS(encode_lgdp(m), std::invalid_argument);
  m.cost_weights = {Rational(0)};
  m.disjunctions = {{{{row({1}, 2)}, Rational(1)}}};
  CHECK_THROWS_AS(encode_lgdp(m), std::invalid_argument);
  m.disjunctions = {{{{row({1, 1}, 2)}, Rational(1)}, {{row({1}, 0)}, Rational(3)}}};
  CHECK_THROWS_AS(encode_lgdp(m), std::invalid_argument);
}

TEST_CASE("lgdp optimum equals enumeration of disjunct choices") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 40; ++k) {
    LgdpModel m;
    m.upper = {Rational(8), Rational(8)};
    m.cost_weights = {Rational(uniform_int(rng, 0, 2)), Rational(uniform_int(rng, 0, 2))};
    for (int d = 0; d < 2; ++d) {
      std::vector<LgdpDisjunct> ds;
      for (int j = 0; j < 2; ++j)
        ds.push_back({{row({uniform_int(rng, -2, 2), uniform_int(rng, -2, 2)}, uniform_int(rng, -4, 6))},
                      Rational(uniform_int(rng, 0, 5))});
      m.disjunctions.push_back(ds);
    }
    std::optional<Rational> best;
    for (int c0 = 0; c0 < 2; ++c0)
      for (int c1 = 0; c1 < 2; ++c1) {
        // Variables: 0 cost, 1 x0, 2 x1.
        std::vector<Atom> atoms;
        auto add = [&](LinTerm t, Rel rel) { atoms.push_back({std::move(t), rel}); };
        LinTerm cost = LinTerm::variable(0);
        cost -= LinTerm::variable(1, m.cost_weights[0]) + LinTerm::variable(2, m.cost_weights[1]);
        cost.add_constant(-(m.disjunctions[0][c0].charge + m.disjunctions[1][c1].charge));
        add(cost, Rel::EQ);
        for (VarId v : {1, 2}) {
          add(LinTerm::variable(v, Rational(-1)), Rel::LE);
          add(LinTerm::variable(v) - LinTerm(Rational(8)), Rel::LE);
        }
        bool ground_false = false;
        for (const LgdpDisjunct *d : {&m.disjunctions[0][c0], &m.disjunctions[1][c1]}) {
          const LinearRow &r = d->rows[0];
          // r·x ≥ rhs  ≡  rhs - r·x ≤ 0
          LinTerm t(r.rhs);
          t -= LinTerm::variable(1, r.coeffs[0]) + LinTerm::variable(2, r.coeffs[1]);
          if (t.is_constant())
            ground_false = ground_false || t.constant().sign() > 0;
          else
            add(t, Rel::LE);
        }
        if (ground_false)
          continue;
        FmResult r = fm_minimize(atoms, 0);
        if (r.status == FmResult::Status::Bounded && (!best || r.value < *best))
          best = r.value;
      }
    OmtOutcome o = solve(encode_lgdp(m), inline_binary());
    if (!best) {
      CHECK(o.status == OmtStatus::Unsat);
    } else {
      CHECK(o.status == OmtStatus::Optimum);
      CHECK(o.value == best);
    }
  }
}

TEST_CASE("ldp examples") {
  {
    Script s;
    VarId x = s.vars.add("x");
    std::vector<VarId> xs{x};
    Expr e = encode_ldp({{row({1}, 1)}, {row({1}, 5), row({-1}, -6)}}, xs, s.props);
    OmtOutcome o = solve_ldp(e, s, x);
    CHECK(o.status == OmtStatus::Optimum);
    CHECK(o.value == Rational(1));
  }
  {
    Script s;
    VarId x = s.vars.add("x");
    std::vector<VarId> xs{x};
    Expr e = encode_ldp({{row({1}, 3), row({-1}, -9)}}, xs, s.props);
    OmtOutcome o = solve_ldp(e, s, x);
    CHECK(o.value == Rational(3));
  }
  {
    Script s;
    VarId x = s.vars.add("x");
    std::vector<VarId> xs{x};
    Expr e = encode_ldp({row({1}, 1)}, {{row({1}, 4), row({1}, 7)}}, xs, s.props);
    s.assertions.push_back(e);
    s.cost = x;
    OmtProblem p = to_problem(s);
    bool two_literal = false;
    for (const Clause &c : p.formula.clauses)
      two_literal = two_literal || c.size() == 2;
    CHECK(two_literal);
    OmtOutcome o = solve(p, inline_binary());
    CHECK(o.value == Rational(4));
  }
  PropTable props;
  std::vector<VarId> xs{0};
  CHECK_THROWS_AS(encode_ldp(std::vector<std::vector<LinearRow>>{}, xs, props), std::invalid_argument);
  CHECK_THROWS_AS(encode_ldp({{row({1, 1}, 1)}}, xs, props), std::invalid_argument);
}

TEST_CASE("pb examples") {
  PbModel a;
  a.num_bools = 2;
  a.weights = {{0, Rational(2)}, {1, Rational(3)}};
  a.hard = {{{0, true}, {1, true}}};
  OmtOutcome oa = solve(encode_pb(a), inline_binary());
  CHECK(oa.status == OmtStatus::Optimum);
  CHECK(oa.value == Rational(2));
  CHECK(oa.assignment[0]);
  CHECK_FALSE(oa.assignment[1]);

  PbModel b;
  b.num_bools = 1;
  b.weights = {{0, Rational(2)}};
  b.hard = {{{0, true}}};
  CHECK(solve(encode_pb(b), offline_linear()).value == Rational(2));

  PbModel c;
  c.num_bools = 2;
  c.hard = {{{0, true}, {1, false}}};
  OmtOutcome oc = solve(encode_pb(c), inline_binary());
  CHECK(oc.status == OmtStatus::Optimum);
  CHECK(oc.value == Rational(0));

  PbModel bad;
  bad.num_bools = 1;
  bad.weights = {{0, Rational(-1)}};
  CHECK_THROWS_AS(encode_pb(bad), std::invalid_argument);
  bad.weights = {{3, Rational(1)}};
  CHECK_THROWS_AS(encode_pb(bad), std::invalid_argument);
}

TEST_CASE("pb optimum equals Boolean brute force") {
  std::mt19937_64 rng(62);
  for (int k = 0; k < 120; ++k) {
    PbModel m;
    m.num_bools = static_cast<std::size_t>(uniform_int(rng, 1, 6));
    for (std::size_t i = 0; i < m.num_bools; ++i)
      if (uniform_int(rng, 0, 3) != 0)
        m.weights.push_back({i, Rational(uniform_int(rng, 0, 12), uniform_int(rng, 1, 3))});
    for (int c = static_cast<int>(uniform_int(rng, 0, 6)); c > 0; --c) {
      std::vector<PbLiteral> clause;
      for (int l = static_cast<int>(uniform_int(rng, 1, 3)); l > 0; --l)
        clause.push_back({static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int64_t>(m.num_bools) - 1)),
                          uniform_int(rng, 0, 1) == 1});
      m.hard.push_back(clause);
    }
    std::optional<Rational> best;
    for (uint64_t a = 0; a < (uint64_t(1) << m.num_bools); ++a) {
      bool ok = true;
      for (const auto &clause : m.hard) {
        bool sat = false;
        for (const PbLiteral &l : clause)
          sat = sat || (((a >> l.var) & 1) == 1) == l.positive;
        ok = ok && sat;
      }
      if (!ok)
        continue;
      Rational sum;
      for (const auto &[i, w] : m.weights)
        if ((a >> i) & 1)
          sum += w;
      if (!best || sum < *best)
        best = sum;
    }
    OmtProblem p = encode_pb(m);
    for (const OmtConfig &c : {inline_binary(), offline_linear()}) {
      OmtOutcome o = solve(p, c);
      if (!best) {
        CHECK(o.status == OmtStatus::Unsat);
      } else {
        CHECK(o.status == OmtStatus::Optimum);
        CHECK(o.value == best);
        CHECK(o.attained);
      }
    }
  }
}

TEST_CASE("strip packing examples") {
  StripPackingInstance squares{{Rational(1), Rational(1)}, {Rational(1), Rational(1)}, Rational(1), 0};
  CHECK(strip_ub_heuristic(squares) == Rational(2));
  OmtOutcome o = solve(strip_packing(squares).problem, inline_binary());
  CHECK(o.status == OmtStatus::Optimum);
  CHECK(o.value == Rational(2));

  StripPackingInstance single{{Rational(3, 4)}, {Rational(1, 2)}, Rational(1), 0};
  CHECK(strip_ub_heuristic(single) == Rational(3, 4));
  CHECK(solve(strip_packing(single).problem, offline_linear()).value == Rational(3, 4));

  StripPackingInstance tall{{Rational(1), Rational(1)}, {Rational(3, 5), Rational(3, 5)}, Rational(1), 0};
  CHECK(strip_ub_heuristic(tall) == Rational(2));

  StripPackingInstance stacked{{Rational(1), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}, Rational(1), 0};
  CHECK(strip_ub_heuristic(stacked) == Rational(1));

  StripPackingInstance too_tall{{Rational(1)}, {Rational(1)}, Rational(1, 2), 0};
  CHECK_THROWS_AS(strip_ub_heuristic(too_tall), std::invalid_argument);
  CHECK_THROWS_AS(gen_strip_packing(0, Rational(1), 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_strip_packing(2, Rational(0), 1), std::invalid_argument);
}

TEST_CASE("strip packing optimum equals disjunct enumeration and placements are valid") {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    for (const Rational &w : {Rational(1), Rational(433, 500)}) {
      StripPacking sp = gen_strip_packing(3, w, seed);
      for (Rational h : sp.instance.height)
        CHECK(h <= w);
      auto expected = testsupport::strip_packing_oracle(sp.instance, sp.ub);
      REQUIRE(expected);
      for (const OmtConfig &c : {inline_binary(), offline_linear()}) {
        OmtOutcome o = solve(sp.problem, c);
        REQUIRE(o.status == OmtStatus::Optimum);
        CHECK(o.value == expected);
        CHECK(*o.value <= sp.ub);
        auto values = concrete_model(sp.problem, o);
        std::vector<Rational> x, y;
        for (std::size_t j = 0; j < 3; ++j) {
          x.push_back(value_of(sp.problem, values, "x" + std::to_string(j)));
          y.push_back(value_of(sp.problem, values, "y" + std::to_string(j)));
        }
        CHECK(testsupport::placement_valid(sp.instance, x, y, value_of(sp.problem, values, "L")));
      }
    }
  }
}

TEST_CASE("heuristic upper bound is sound") {
  SplitMix64 draw(63);
  for (uint64_t k = 0; k < 100; ++k) {
    std::size_t n = 1 + draw.next() % 5;
    Rational w = k % 2 ? Rational(1) : Rational(3, 4);
    StripPacking sp = gen_strip_packing(n, w, 1000 + k);
    OmtOutcome o = solve(sp.problem, inline_binary());
    REQUIRE(o.status == OmtStatus::Optimum);
    CHECK(*o.value <= sp.ub);
  }
  for (uint64_t k = 0; k < 3; ++k) {
    StripPacking sp = gen_strip_packing(6, Rational(1), 2000 + k);
    OmtOutcome o = solve(sp.problem, inline_binary());
    REQUIRE(o.status == OmtStatus::Optimum);
    CHECK(*o.value <= sp.ub);
  }
}

TEST_CASE("job-shop examples") {
  JobShopInstance one{{{Rational(1, 2), Rational(1, 4), Rational(1, 8)}}, {}, 0};
  OmtOutcome o = solve(jobshop(one).problem, inline_binary());
  CHECK(o.status == OmtStatus::Optimum);
  CHECK(o.value == Rational(7, 8));

  JobShopInstance two{{{Rational(1, 3)}, {Rational(1, 2)}}, {}, 0};
  OmtOutcome t = solve(jobshop(two).problem, offline_linear());
  CHECK(t.value == Rational(5, 6));
  CHECK(testsupport::jobshop_oracle(two) == Rational(5, 6));

  CHECK_THROWS_AS(gen_jobshop(0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_jobshop(2, 0, 1), std::invalid_argument);
  JobShopInstance ragged{{{Rational(1)}, {Rational(1), Rational(1)}}, {}, 0};
  CHECK_THROWS_AS(jobshop(ragged), std::invalid_argument);
}

TEST_CASE("job-shop optimum equals precedence enumeration and schedules are valid") {
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    JobShop js = gen_jobshop(3, 2, seed);
    Rational expected = testsupport::jobshop_oracle(js.instance);
    for (const OmtConfig &c : {inline_binary(), offline_linear()}) {
      OmtOutcome o = solve(js.problem, c);
      REQUIRE(o.status == OmtStatus::Optimum);
      CHECK(o.value == expected);
      auto values = concrete_model(js.problem, o);
      std::vector<Rational> start;
      for (std::size_t i = 0; i < 3; ++i)
        start.push_back(value_of(js.problem, values, "s" + std::to_string(i)));
      CHECK(testsupport::schedule_valid(js.instance, start, value_of(js.problem, values, "ms")));
    }
  }
}

TEST_CASE("generators are deterministic in the seed") {
  for (uint64_t seed : {1, 7, 99}) {
    CHECK(print_script(gen_strip_packing(4, Rational(1), seed).script) ==
          print_script(gen_strip_packing(4, Rational(1), seed).script));
    CHECK(print_script(gen_jobshop(3, 3, seed).script) == print_script(gen_jobshop(3, 3, seed).script));
  }
  CHECK(print_script(gen_strip_packing(4, Rational(1), 1).script) !=
        print_script(gen_strip_packing(4, Rational(1), 2).script));
  CHECK(print_script(gen_jobshop(3, 3, 1).script) != print_script(gen_jobshop(3, 3, 2).script));

  std::string text = print_script(gen_strip_packing(2, Rational(1), 7).script);
  CHECK(text.find("seed 7") != std::string::npos);
  CHECK(text.find("heuristic-ub") != std::string::npos);
}
