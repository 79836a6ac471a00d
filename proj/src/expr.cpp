#include "optsmt/expr.hpp"

#include <algorithm>

namespace optsmt {

Expr Expr::constant(bool value) { return Expr(value ? Kind::True : Kind::False, 0, {}); }

Expr Expr::prop(PropId p) { return Expr(Kind::Prop, p, {}); }

Expr Expr::literal(Literal l) {
  return l.positive ? prop(l.prop) : lnot(prop(l.prop));
}

Expr Expr::lnot(Expr e) {
  switch (e.kind()) {
  case Kind::True:
    return constant(false);
  case Kind::False:
    return constant(true);
  case Kind::Not:
    return e.children()[0];
  default:
    return Expr(Kind::Not, 0, {std::move(e)});
  }
}

namespace {

Expr flatten(Expr::Kind kind, std::vector<Expr> children, Expr unit, Expr zero) {
  std::vector<Expr> flat;
  for (auto &c : children) {
    if (c.kind() == zero.kind())
      return zero;
    if (c.kind() == unit.kind())
      continue;
    if (c.kind() == kind) {
      for (const auto &g : c.children())
        flat.push_back(g);
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.empty())
    return unit;
  if (flat.size() == 1)
    return flat.front();
  return kind == Expr::Kind::And ? Expr::land(std::move(flat)) : Expr::lor(std::move(flat));
}

} // namespace

Expr Expr::land(std::vector<Expr> children) {
  bool flat = children.size() >= 2;
  for (const auto &c : children)
    flat = flat && c.kind() != Kind::And && c.kind() != Kind::True && c.kind() != Kind::False;
  if (flat)
    return Expr(Kind::And, 0, std::move(children));
  return flatten(Kind::And, std::move(children), constant(true), constant(false));
}

Expr Expr::lor(std::vector<Expr> children) {
  bool flat = children.size() >= 2;
  for (const auto &c : children)
    flat = flat && c.kind() != Kind::Or && c.kind() != Kind::True && c.kind() != Kind::False;
  if (flat)
    return Expr(Kind::Or, 0, std::move(children));
  return flatten(Kind::Or, std::move(children), constant(false), constant(true));
}

Expr Expr::implies(Expr a, Expr b) {
  if (a.is_false() || b.is_true())
    return constant(true);
  if (a.is_true())
    return b;
  return Expr(Kind::Implies, 0, {std::move(a), std::move(b)});
}

Expr Expr::iff(Expr a, Expr b) {
  if (a.is_true())
    return b;
  if (b.is_true())
    return a;
  if (a.is_false())
    return lnot(std::move(b));
  if (b.is_false())
    return lnot(std::move(a));
  return Expr(Kind::Iff, 0, {std::move(a), std::move(b)});
}

bool Expr::evaluate(std::span<const bool> assignment) const {
  switch (kind()) {
  case Kind::True:
    return true;
  case Kind::False:
    return false;
  case Kind::Prop:
    return assignment[prop_id()];
  case Kind::Not:
    return !children()[0].evaluate(assignment);
  case Kind::And:
    return std::all_of(children().begin(), children().end(),
                       [&](const Expr &c) { return c.evaluate(assignment); });
  case Kind::Or:
    return std::any_of(children().begin(), children().end(),
                       [&](const Expr &c) { return c.evaluate(assignment); });
  case Kind::Implies:
    return !children()[0].evaluate(assignment) || children()[1].evaluate(assignment);
  case Kind::Iff:
    return children()[0].evaluate(assignment) == children()[1].evaluate(assignment);
  }
  return false;
}

namespace {

class CnfBuilder {
public:
  CnfBuilder(PropTable &props, std::vector<Clause> &out) : props_(props), out_(out) {}

  void top(const Expr &e) {
    if (e.kind() == Expr::Kind::And) {
      for (const auto &c : e.children())
        top(c);
      return;
    }
    Clause clause;
    bool satisfied = false;
    disjuncts(e, clause, satisfied);
    if (!satisfied)
      emit(std::move(clause));
  }

  /// Rewrites `e` so negations sit directly above propositions, except
  /// below ↔ where both polarities are kept. Negated equalities are split.
  Expr push(const Expr &e, bool neg, bool both) {
    using K = Expr::Kind;
    switch (e.kind()) {
    case K::True:
    case K::False:
      return Expr::constant(e.is_true() != neg);
    case K::Prop:
      return push_prop(e.prop_id(), neg, both);
    case K::Not:
      return push(e.children()[0], !neg, both);
    case K::And:
    case K::Or: {
      std::vector<Expr> cs;
      for (const auto &c : e.children())
        cs.push_back(push(c, neg, both));
      bool conj = (e.kind() == K::And) != neg;
      return conj ? Expr::land(std::move(cs)) : Expr::lor(std::move(cs));
    }
    case K::Implies: {
      auto a = e.children()[0], b = e.children()[1];
      if (!neg)
        return Expr::lor({push(a, true, both), push(b, false, both)});
      return Expr::land({push(a, false, both), push(b, true, both)});
    }
    case K::Iff:
      return Expr::iff(push(e.children()[0], false, true), push(e.children()[1], neg, true));
    }
    return e;
  }

private:
  Expr push_prop(PropId p, bool neg, bool both) {
    if (props_.is_atom(p) && props_.atom(p).rel == Rel::EQ && (neg || both)) {
      LinTerm t = props_.atom(p).term;
      PropId le = props_.intern_atom({t, Rel::LE});
      PropId lt = props_.intern_atom({t, Rel::LT});
      // t = 0  ≡  (t ≤ 0) ∧ ¬(t < 0)
      if (!neg)
        return Expr::land({Expr::prop(le), Expr::lnot(Expr::prop(lt))});
      return Expr::lor({Expr::prop(lt), Expr::lnot(Expr::prop(le))});
    }
    return neg ? Expr::lnot(Expr::prop(p)) : Expr::prop(p);
  }

  void disjuncts(const Expr &e, Clause &clause, bool &satisfied) {
    using K = Expr::Kind;
    switch (e.kind()) {
    case K::True:
      satisfied = true;
      return;
    case K::False:
      return;
    case K::Or:
      for (const auto &c : e.children())
        disjuncts(c, clause, satisfied);
      return;
    default:
      clause.push_back(encode(e, true, false));
    }
  }

  Literal encode(const Expr &e, bool pos, bool neg) {
    using K = Expr::Kind;
    switch (e.kind()) {
    case K::Prop:
      return {e.prop_id(), true};
    case K::Not:
      return ~encode(e.children()[0], neg, pos);
    case K::True:
    case K::False: {
      Literal p{props_.add_label(), true};
      emit({e.is_true() ? p : ~p});
      return p;
    }
    case K::And:
    case K::Or: {
      std::vector<Literal> ls;
      for (const auto &c : e.children())
        ls.push_back(encode(c, pos, neg));
      Literal p{props_.add_label(), true};
      bool conj = e.kind() == K::And;
      // Conjunction: p → li and (∧li) → p.  Disjunction: p → ∨li and li → p.
      if (conj ? pos : neg)
        for (auto l : ls)
          emit({conj ? ~p : p, conj ? l : ~l});
      if (conj ? neg : pos) {
        Clause c{conj ? p : ~p};
        for (auto l : ls)
          c.push_back(conj ? ~l : l);
        emit(std::move(c));
      }
      return p;
    }
    case K::Implies:
      return encode(Expr::lor({Expr::lnot(e.children()[0]), e.children()[1]}), pos, neg);
    case K::Iff: {
      Literal a = encode(e.children()[0], true, true);
      Literal b = encode(e.children()[1], true, true);
      Literal p{props_.add_label(), true};
      if (pos) {
        emit({~p, ~a, b});
        emit({~p, a, ~b});
      }
      if (neg) {
        emit({p, a, b});
        emit({p, ~a, ~b});
      }
      return p;
    }
    }
    return {0, true};
  }

  void emit(Clause c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
      if (c[i].prop == c[i + 1].prop)
        return; // tautology
    out_.push_back(std::move(c));
  }

  PropTable &props_;
  std::vector<Clause> &out_;
};

} // namespace

void cnfize(const Expr &e, PropTable &props, std::vector<Clause> &out) {
  CnfBuilder b(props, out);
  b.top(b.push(e, false, false));
}

std::vector<Clause> cnfize(const Expr &e, PropTable &props) {
  std::vector<Clause> out;
  cnfize(e, props, out);
  return out;
}

} // namespace optsmt
