#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "optsmt/la_solver.hpp"
#include "optsmt/oracle.hpp"
#include "support.hpp"

using namespace optsmt;
using testsupport::literal_atom;
using testsupport::uniform_int;

namespace {

struct Fixture {
  PropTable props;
  LaSolver la;

  explicit Fixture(std::size_t nvars) : la(nvars) {}

  Literal lit(const LinTerm &lhs, RawRel rel, const Rational &rhs) {
    NormalizedAtom n = normalize_atom(lhs, rel, rhs);
    PropId p = props.intern_atom(n.atom);
    la.register_atom(p, n.atom);
    return {p, n.positive};
  }

  Literal registered(const Literal &l) {
    la.register_atom(l.prop, props.atom(l.prop));
    return l;
  }
};

LinTerm X(VarId v, int64_t c = 1) { return LinTerm::variable(v, Rational(c)); }

bool fm_infeasible(const std::vector<Atom> &atoms) {
  return fm_minimize(atoms, 0).status == FmResult::Status::Infeasible;
}

std::vector<Atom> atoms_of(const PropTable &props, const std::vector<Literal> &lits) {
  std::vector<Atom> out;
  for (Literal l : lits)
    out.push_back(literal_atom(props, l));
  return out;
}

bool contains(const std::vector<Literal> &v, Literal l) {
  return std::find(v.begin(), v.end(), l) != v.end();
}

// The premises together with the negation of `implied` admit no point.
bool entails(const PropTable &props, const std::vector<Literal> &premises, Literal implied) {
  std::vector<Atom> base = atoms_of(props, premises);
  const Atom &a = props.atom(implied.prop);
  if (a.rel == Rel::EQ && implied.positive) {
    auto below = base, above = base;
    below.push_back({a.term, Rel::LT});
    above.push_back({-a.term, Rel::LT});
    return fm_infeasible(below) && fm_infeasible(above);
  }
  base.push_back(implied.positive ? literal_atom(props, ~implied) : a);
  return fm_infeasible(base);
}

bool model_satisfies(const PropTable &props, const std::vector<Literal> &lits,
                     const std::vector<DeltaRational> &model) {
  for (Literal l : lits)
    if (props.atom(l.prop).holds(std::span<const DeltaRational>(model)) != l.positive)
      return false;
  return true;
}

} // namespace

TEST_CASE("assert_literal examples") {
  {
    Fixture f(1);
    REQUIRE_FALSE(f.la.assert_literal(f.lit(X(0), RawRel::LE, Rational(1))));
    Literal ge2 = f.lit(X(0), RawRel::GE, Rational(2));
    auto c = f.la.assert_literal(ge2);
    REQUIRE(c);
    CHECK(c->size() == 2);
    CHECK(contains(*c, ge2));
  }
  {
    Fixture f(1);
    REQUIRE_FALSE(f.la.assert_literal(f.lit(X(0), RawRel::LT, Rational(1))));
    auto c = f.la.assert_literal(f.lit(X(0), RawRel::GT, Rational(1)));
    REQUIRE(c);
    CHECK(c->size() == 2);
  }
  {
    Fixture f(2);
    std::vector<Literal> lits{f.lit(X(0) + X(1), RawRel::LE, Rational(0)),
                              f.lit(X(0) - X(1), RawRel::LE, Rational(0)),
                              f.lit(X(0), RawRel::GE, Rational(1))};
    bool conflict = false;
    std::vector<Literal> expl;
    for (Literal l : lits)
      if (auto c = f.la.assert_literal(l)) {
        conflict = true;
        expl = *c;
        break;
      }
    if (!conflict) {
      conflict = !f.la.check();
      expl = f.la.explanation();
    }
    REQUIRE(conflict);
    for (Literal l : lits)
      CHECK(contains(expl, l));
  }
}

TEST_CASE("a conflicting assertion leaves the state unchanged") {
  Fixture f(1);
  REQUIRE_FALSE(f.la.assert_literal(f.lit(X(0), RawRel::LE, Rational(1))));
  auto mark = f.la.mark();
  REQUIRE(f.la.assert_literal(f.lit(X(0), RawRel::GE, Rational(2))));
  CHECK(f.la.mark() == mark);
  CHECK(f.la.check());
  CHECK(f.la.value(0) <= DeltaRational(Rational(1)));
}

TEST_CASE("assert_literal errors") {
  Fixture f(1);
  CHECK_THROWS_AS(f.la.assert_literal({42, true}), std::logic_error);
  Literal eq = f.lit(X(0), RawRel::EQ, Rational(1));
  CHECK_THROWS_AS(f.la.assert_literal(~eq), std::logic_error);
  PropId other = f.props.intern_atom(le_atom(0, Rational(5)));
  CHECK_THROWS_AS(f.la.register_atom(eq.prop, f.props.atom(other)), std::logic_error);
}

TEST_CASE("check examples") {
  {
    Fixture f(2);
    f.la.assert_literal(f.lit(X(0) + X(1), RawRel::GE, Rational(2)));
    f.la.assert_literal(f.lit(X(0), RawRel::LE, Rational(1)));
    f.la.assert_literal(f.lit(X(1), RawRel::LE, Rational(1)));
    REQUIRE(f.la.check());
    auto m = f.la.model();
    CHECK(m[0] == DeltaRational(Rational(1)));
    CHECK(m[1] == DeltaRational(Rational(1)));
  }
  {
    Fixture f(2);
    std::vector<Literal> lits{f.lit(X(0) + X(1), RawRel::GE, Rational(3)),
                              f.lit(X(0), RawRel::LE, Rational(1)),
                              f.lit(X(1), RawRel::LE, Rational(1))};
    for (Literal l : lits)
      REQUIRE_FALSE(f.la.assert_literal(l));
    REQUIRE_FALSE(f.la.check());
    auto e = f.la.explanation();
    CHECK(e.size() == 3);
    for (Literal l : lits)
      CHECK(contains(e, l));
  }
  {
    LaSolver la(3);
    CHECK(la.check());
  }
}

TEST_CASE("mark and backtrack examples") {
  Fixture f(1);
  auto m0 = f.la.mark();
  REQUIRE_FALSE(f.la.assert_literal(f.lit(X(0), RawRel::LE, Rational(0))));
  f.la.backtrack_to(m0);
  CHECK_FALSE(f.la.assert_literal(f.lit(X(0), RawRel::GE, Rational(5))));
  CHECK(f.la.check());

  Fixture g(1);
  auto a = g.la.mark();
  g.la.assert_literal(g.lit(X(0), RawRel::LE, Rational(10)));
  auto b = g.la.mark();
  g.la.assert_literal(g.lit(X(0), RawRel::LE, Rational(3)));
  g.la.backtrack_to(b);
  // x ≤ 10 survives, x ≤ 3 is gone.
  CHECK_FALSE(g.la.assert_literal(g.lit(X(0), RawRel::GE, Rational(7))));
  CHECK(g.la.assert_literal(g.lit(X(0), RawRel::GE, Rational(11))));
  g.la.backtrack_to(a);
  CHECK_FALSE(g.la.assert_literal(g.lit(X(0), RawRel::GE, Rational(11))));
  CHECK_THROWS_AS(g.la.backtrack_to(g.la.mark() + 5), std::logic_error);
}

TEST_CASE("backtracking to the initial mark behaves like a fresh solver") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 200; ++k) {
    auto conj = testsupport::random_conjunction(rng, 3, 6, false);
    LaSolver used(3), fresh(3);
    for (Literal l : conj.lits) {
      used.register_atom(l.prop, conj.props.atom(l.prop));
      fresh.register_atom(l.prop, conj.props.atom(l.prop));
    }
    auto m = used.mark();
    for (Literal l : conj.lits)
      if (used.assert_literal(l))
        break;
    used.check();
    used.backtrack_to(m);
    CHECK(used.check());
    CHECK(used.consistent());
    std::mt19937_64 order(k);
    auto lits = conj.lits;
    std::shuffle(lits.begin(), lits.end(), order);
    bool used_ok = true, fresh_ok = true;
    for (Literal l : lits) {
      used_ok = used_ok && !used.assert_literal(l);
      fresh_ok = fresh_ok && !fresh.assert_literal(l);
    }
    used_ok = used_ok && used.check();
    fresh_ok = fresh_ok && fresh.check();
    CHECK(used_ok == fresh_ok);
  }
}

TEST_CASE("theory_propagate examples") {
  {
    Fixture f(1);
    Literal le1 = f.lit(X(0), RawRel::LE, Rational(1));
    Literal le3 = f.lit(X(0), RawRel::LE, Rational(3));
    f.la.assert_literal(le1);
    REQUIRE(f.la.check());
    auto props = f.la.theory_propagate();
    REQUIRE(props.size() == 1);
    CHECK(props[0].first == le3);
    CHECK(props[0].second == std::vector<Literal>{le1});
  }
  {
    Fixture f(1);
    Literal ge2 = f.lit(X(0), RawRel::GE, Rational(2));
    Literal lt1 = f.lit(X(0), RawRel::LT, Rational(1));
    f.la.assert_literal(ge2);
    REQUIRE(f.la.check());
    auto props = f.la.theory_propagate();
    REQUIRE(props.size() == 1);
    CHECK(props[0].first == ~lt1);
  }
  {
    Fixture f(2);
    f.lit(X(0), RawRel::LE, Rational(1));
    f.lit(X(0) + X(1), RawRel::GE, Rational(4));
    REQUIRE(f.la.check());
    CHECK(f.la.theory_propagate().empty());
  }
}

TEST_CASE("model examples") {
  {
    Fixture f(1);
    f.la.assert_literal(f.lit(X(0), RawRel::EQ, Rational(3)));
    REQUIRE(f.la.check());
    CHECK(f.la.model()[0] == DeltaRational(Rational(3)));
  }
  {
    Fixture f(1);
    f.la.assert_literal(f.lit(X(0), RawRel::GT, Rational(0)));
    REQUIRE(f.la.check());
    DeltaRational v = f.la.model()[0];
    CHECK(v.real().is_zero());
    CHECK(v.eps() >= Rational(1));
  }
  {
    Fixture f(2);
    f.la.assert_literal(f.lit(X(0) + X(1), RawRel::EQ, Rational(1)));
    f.la.assert_literal(f.lit(X(0), RawRel::GE, Rational(0)));
    f.la.assert_literal(f.lit(X(1), RawRel::GE, Rational(0)));
    REQUIRE(f.la.check());
    auto m = f.la.model();
    CHECK(m[0] + m[1] == DeltaRational(Rational(1)));
    CHECK(m[0] >= DeltaRational());
    CHECK(m[1] >= DeltaRational());
  }
}

TEST_CASE("verdicts, explanations, models and propagations agree with elimination") {
  std::mt19937_64 rng(32);
  int unsat = 0;
  for (int k = 0; k < 1000; ++k) {
    int nvars = static_cast<int>(uniform_int(rng, 1, 6));
    int natoms = static_cast<int>(uniform_int(rng, 1, 12));
    auto conj = testsupport::random_conjunction(rng, nvars, natoms, false);
    Fixture f(static_cast<std::size_t>(nvars));
    f.props = conj.props;
    for (std::size_t p = 0; p < conj.props.size(); ++p)
      f.registered({static_cast<PropId>(p), true});

    std::vector<Literal> asserted;
    bool ok = true;
    for (Literal l : conj.lits) {
      if (auto c = f.la.assert_literal(l)) {
        CHECK(contains(*c, l));
        for (Literal e : *c)
          CHECK((e == l || contains(asserted, e)));
        CHECK(fm_infeasible(atoms_of(f.props, *c)));
        ok = false;
        break;
      }
      asserted.push_back(l);
      if (uniform_int(rng, 0, 1) == 0)
        continue;
      if (!f.la.check()) {
        for (Literal e : f.la.explanation())
          CHECK(contains(asserted, e));
        CHECK(fm_infeasible(atoms_of(f.props, f.la.explanation())));
        ok = false;
        break;
      }
      CHECK(f.la.consistent());
      CHECK(model_satisfies(f.props, asserted, f.la.model()));
      for (const auto &[implied, expl] : f.la.theory_propagate()) {
        CHECK_FALSE(contains(asserted, implied));
        for (Literal e : expl)
          CHECK(contains(asserted, e));
        CHECK(entails(f.props, expl, implied));
      }
    }
    if (ok) {
      ok = f.la.check();
      if (ok) {
        CHECK(model_satisfies(f.props, asserted, f.la.model()));
      } else {
        for (Literal e : f.la.explanation())
          CHECK(contains(asserted, e));
        CHECK(fm_infeasible(atoms_of(f.props, f.la.explanation())));
      }
    }
    unsat += !ok;
    CHECK(ok == !fm_infeasible(conj.atoms()));
  }
  CHECK(unsat > 50);
  CHECK(unsat < 950);
}

TEST_CASE("incremental assertion agrees with batch assertion") {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 500; ++k) {
    int nvars = static_cast<int>(uniform_int(rng, 1, 5));
    auto conj = testsupport::random_conjunction(rng, nvars, static_cast<int>(uniform_int(rng, 1, 10)), false);
    auto run = [&](bool incremental) {
      LaSolver la(static_cast<std::size_t>(nvars));
      for (Literal l : conj.lits)
        la.register_atom(l.prop, conj.props.atom(l.prop));
      for (Literal l : conj.lits) {
        if (la.assert_literal(l))
          return false;
        if (incremental && !la.check())
          return false;
      }
      return la.check();
    };
    CHECK(run(true) == run(false));
  }
}

TEST_CASE("backtracking restores the verdict of the remaining assertions") {
  std::mt19937_64 rng(34);
  for (int k = 0; k < 500; ++k) {
    int nvars = static_cast<int>(uniform_int(rng, 1, 5));
    auto a = testsupport::random_conjunction(rng, nvars, static_cast<int>(uniform_int(rng, 1, 6)), false);
    LaSolver la(static_cast<std::size_t>(nvars));
    for (std::size_t p = 0; p < a.props.size(); ++p)
      la.register_atom(static_cast<PropId>(p), a.props.atom(static_cast<PropId>(p)));
    std::size_t split = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int64_t>(a.lits.size())));
    std::vector<Literal> first(a.lits.begin(), a.lits.begin() + static_cast<std::ptrdiff_t>(split));
    bool first_ok = true;
    for (Literal l : first)
      first_ok = first_ok && !la.assert_literal(l);
    if (!first_ok)
      continue;
    first_ok = la.check();
    auto m = la.mark();
    for (std::size_t i = split; i < a.lits.size(); ++i)
      if (la.assert_literal(a.lits[i]))
        break;
    la.check();
    la.backtrack_to(m);
    CHECK(la.check() == first_ok);
    CHECK(first_ok == !fm_infeasible(atoms_of(a.props, first)));
    if (first_ok) {
      CHECK(la.consistent());
      CHECK(model_satisfies(a.props, first, la.model()));
    }
  }
}

TEST_CASE("degenerate instances terminate") {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 300; ++k) {
    int nvars = static_cast<int>(uniform_int(rng, 2, 5));
    Fixture f(static_cast<std::size_t>(nvars));
    std::vector<Literal> lits;
    // Every hyperplane passes through the origin.
    for (int a = 0; a < 12; ++a) {
      auto c = testsupport::random_constraint(rng, nvars, 3, 0, false);
      if (c.rel == RawRel::EQ)
        c.rel = RawRel::LE;
      lits.push_back(f.lit(c.term, c.rel, Rational(0)));
    }
    bool ok = true;
    for (Literal l : lits)
      ok = ok && !f.la.assert_literal(l);
    if (ok)
      ok = f.la.check();
    CHECK(ok == !fm_infeasible(atoms_of(f.props, lits)));
  }
}
