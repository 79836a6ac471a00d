#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "optsmt/expr.hpp"
#include "optsmt/formula.hpp"

namespace optsmt {

/// A problem in its pre-CNF form: declarations, asserted expressions and
/// the objective. This is what the text format describes one-to-one.
struct Script {
  VarTable vars;
  PropTable props;
  std::vector<Expr> assertions;
  std::optional<VarId> cost;
  std::optional<Rational> lb;
  std::optional<Rational> ub;
  /// Emitted as leading `;` comment lines by print_script.
  std::vector<std::string> comments;
};

class ParseError : public std::runtime_error {
public:
  enum class Kind { Syntax, Sort, UnknownIdentifier, MultipleObjectives, MissingObjective, Semantic };

  ParseError(Kind kind, int line, int column, const std::string &message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

private:
  Kind kind_;
  int line_;
  int column_;
};

/// Reads the s-expression input format:
///   (declare-fun x () Real) (declare-fun b () Bool) (declare-const x Real)
///   (assert e) (minimize x) (set-info :lb r) (set-info :ub r) (check-sat)
/// Throws ParseError.
Script parse_script(std::string_view text);

/// CNF-izes every assertion and packages the objective. Throws
/// std::invalid_argument if there is no objective or lb >= ub.
OmtProblem to_problem(const Script &script);

OmtProblem parse_problem(std::string_view text);

/// Writes `script` in the input format. parse_script(print_script(s))
/// describes the same problem.
std::string print_script(const Script &script);

/// SMT-LIB spelling of a rational constant, e.g. "(- (/ 3 4))".
std::string smtlib_number(const Rational &r);

} // namespace optsmt
