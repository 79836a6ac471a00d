#pragma once

#include <memory>
#include <span>
#include <vector>

#include "optsmt/formula.hpp"

namespace optsmt {

/// Immutable Boolean expression over propositions. Cheap to copy; nodes are
/// shared.
class Expr {
public:
  enum class Kind { True, False, Prop, Not, And, Or, Implies, Iff };

  Expr() : Expr(Kind::True, 0, {}) {}

  static Expr constant(bool value);
  static Expr prop(PropId p);
  static Expr literal(Literal l);
  static Expr lnot(Expr e);
  static Expr land(std::vector<Expr> children);
  static Expr lor(std::vector<Expr> children);
  static Expr implies(Expr a, Expr b);
  static Expr iff(Expr a, Expr b);

  Kind kind() const { return node_->kind; }
  PropId prop_id() const { return node_->prop; }
  std::span<const Expr> children() const { return node_->children; }
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }

  /// Truth value under an assignment of every proposition.
  bool evaluate(std::span<const bool> assignment) const;

private:
  struct Node {
    Kind kind;
    PropId prop;
    std::vector<Expr> children;
  };
  Expr(Kind k, PropId p, std::vector<Expr> children)
      : node_(std::make_shared<const Node>(Node{k, p, std::move(children)})) {}

  std::shared_ptr<const Node> node_;
};

/// Plaisted–Greenbaum conversion of `e` into clauses, appended to `out`.
/// Fresh labels and the strict atoms produced by splitting negated
/// equalities are added to `props`. Negated equality atoms never reach the
/// output: ¬(t = 0) becomes (t < 0) ∨ (t > 0).
void cnfize(const Expr &e, PropTable &props, std::vector<Clause> &out);

/// Convenience wrapper returning only the clauses.
std::vector<Clause> cnfize(const Expr &e, PropTable &props);

} // namespace optsmt
