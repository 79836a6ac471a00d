#include "optsmt/script.hpp"

#include <cctype>
#include <sstream>
#include <variant>

namespace optsmt {

ParseError::ParseError(Kind kind, int line, int column, const std::string &message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind), line_(line), column_(column) {}

namespace {

struct SExpr {
  enum class Kind { List, Symbol, Number, Keyword, String } kind = Kind::List;
  std::string text;
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;

  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
};

using PK = ParseError::Kind;

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

private:
  [[noreturn]] void fail(const std::string &msg) { throw ParseError(PK::Syntax, line_, col_, msg); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = text_[pos_];
    if (c == '(') {
      advance();
      skip_space();
      while (true) {
        if (pos_ >= text_.size())
          throw ParseError(PK::Syntax, e.line, e.column, "unterminated list");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
        skip_space();
      }
      return e;
    }
    if (c == ')')
      fail("unexpected ')'");
    if (c == '|') {
      advance();
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '|') {
        s += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size())
        fail("unterminated quoted symbol");
      advance();
      e.kind = SExpr::Kind::Symbol;
      e.text = std::move(s);
      return e;
    }
    if (c == '"') {
      advance();
      std::string s;
      while (pos_ < text_.size()) {
        if (text_[pos_] == '"') {
          advance();
          if (pos_ < text_.size() && text_[pos_] == '"') {
            s += '"';
            advance();
            continue;
          }
          e.kind = SExpr::Kind::String;
          e.text = std::move(s);
          return e;
        }
        s += text_[pos_];
        advance();
      }
      fail("unterminated string");
    }
    std::string s;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';')
        break;
      s += d;
      advance();
    }
    e.text = s;
    bool numeric = !s.empty();
    std::size_t start = (s.size() > 1 && s[0] == '-') ? 1 : 0;
    int dots = 0;
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] == '.')
        ++dots;
      else if (!std::isdigit(static_cast<unsigned char>(s[i])))
        numeric = false;
    }
    if (numeric && dots <= 1 && s != "." && s != "-")
      e.kind = SExpr::Kind::Number;
    else if (s[0] == ':')
      e.kind = SExpr::Kind::Keyword;
    else
      e.kind = SExpr::Kind::Symbol;
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

using Value = std::variant<Expr, LinTerm>;

class Elaborator {
public:
  Script run(const std::vector<SExpr> &commands) {
    for (const auto &cmd : commands)
      command(cmd);
    return std::move(script_);
  }

private:
  [[noreturn]] static void fail(PK kind, const SExpr &at, const std::string &msg) {
    throw ParseError(kind, at.line, at.column, msg);
  }

  void command(const SExpr &cmd) {
    if (cmd.kind != SExpr::Kind::List || cmd.items.empty() ||
        cmd.items[0].kind != SExpr::Kind::Symbol)
      fail(PK::Syntax, cmd, "expected a command");
    const std::string &name = cmd.items[0].text;
    const auto &args = cmd.items;
    if (name == "declare-fun") {
      if (args.size() != 4 || args[1].kind != SExpr::Kind::Symbol ||
          args[2].kind != SExpr::Kind::List || !args[2].items.empty())
        fail(PK::Syntax, cmd, "expected (declare-fun <id> () <sort>)");
      declare(args[1], args[3]);
    } else if (name == "declare-const") {
      if (args.size() != 3 || args[1].kind != SExpr::Kind::Symbol)
        fail(PK::Syntax, cmd, "expected (declare-const <id> <sort>)");
      declare(args[1], args[2]);
    } else if (name == "assert") {
      if (args.size() != 2)
        fail(PK::Syntax, cmd, "expected (assert <expr>)");
      script_.assertions.push_back(boolean(args[1]));
    } else if (name == "minimize") {
      if (args.size() != 2 || args[1].kind != SExpr::Kind::Symbol)
        fail(PK::Syntax, cmd, "expected (minimize <id>)");
      if (script_.cost)
        fail(PK::MultipleObjectives, cmd, "multiple objectives");
      auto v = script_.vars.find(args[1].text);
      if (!v) {
        if (script_.props.find_bool(args[1].text))
          fail(PK::Sort, args[1], "objective must be a Real variable: " + args[1].text);
        fail(PK::UnknownIdentifier, args[1], "unknown identifier: " + args[1].text);
      }
      script_.cost = *v;
    } else if (name == "set-info") {
      if (args.size() < 2 || args[1].kind != SExpr::Kind::Keyword)
        fail(PK::Syntax, cmd, "expected (set-info :<keyword> ...)");
      if (args[1].text == ":lb" || args[1].text == ":ub") {
        if (args.size() != 3)
          fail(PK::Syntax, cmd, "expected a rational after " + args[1].text);
        Rational r = constant(args[2]);
        (args[1].text == ":lb" ? script_.lb : script_.ub) = r;
      }
    } else if (name == "check-sat" || name == "set-logic" || name == "set-option" ||
               name == "exit" || name == "get-model" || name == "get-objectives") {
      // accepted and ignored
    } else {
      fail(PK::Syntax, cmd, "unsupported command: " + name);
    }
  }

  void declare(const SExpr &id, const SExpr &sort) {
    if (script_.vars.find(id.text) || script_.props.find_bool(id.text))
      fail(PK::Semantic, id, "redeclared identifier: " + id.text);
    if (sort.is_symbol("Real"))
      script_.vars.add(id.text);
    else if (sort.is_symbol("Bool"))
      script_.props.add_bool(id.text);
    else
      fail(PK::Sort, sort, "unsupported sort (expected Real or Bool)");
  }

  Rational constant(const SExpr &e) {
    LinTerm t = term(e);
    if (!t.is_constant())
      fail(PK::Sort, e, "expected a rational constant");
    return t.constant();
  }

  Expr boolean(const SExpr &e) {
    Value v = value(e);
    if (auto *b = std::get_if<Expr>(&v))
      return *b;
    fail(PK::Sort, e, "expected a Boolean expression");
  }

  LinTerm term(const SExpr &e) {
    Value v = value(e);
    if (auto *t = std::get_if<LinTerm>(&v))
      return *t;
    fail(PK::Sort, e, "Boolean used as arithmetic term");
  }

  Value value(const SExpr &e) {
    switch (e.kind) {
    case SExpr::Kind::Number:
      return LinTerm(Rational::parse(e.text));
    case SExpr::Kind::Symbol:
      return symbol(e);
    case SExpr::Kind::List:
      return application(e);
    default:
      fail(PK::Syntax, e, "unexpected token: " + e.text);
    }
  }

  Value symbol(const SExpr &e) {
    if (e.text == "true")
      return Expr::constant(true);
    if (e.text == "false")
      return Expr::constant(false);
    if (auto v = script_.vars.find(e.text))
      return LinTerm::variable(*v);
    if (auto p = script_.props.find_bool(e.text))
      return Expr::prop(*p);
    fail(PK::UnknownIdentifier, e, "unknown identifier: " + e.text);
  }

  Value application(const SExpr &e) {
    if (e.items.empty() || e.items[0].kind != SExpr::Kind::Symbol)
      fail(PK::Syntax, e, "expected an operator application");
    const std::string &op = e.items[0].text;
    std::span<const SExpr> args(e.items.begin() + 1, e.items.end());
    auto need = [&](std::size_t lo) {
      if (args.size() < lo)
        fail(PK::Syntax, e, "too few arguments to " + op);
    };

    if (op == "not") {
      if (args.size() != 1)
        fail(PK::Syntax, e, "not takes one argument");
      return Expr::lnot(boolean(args[0]));
    }
    if (op == "and" || op == "or") {
      std::vector<Expr> cs;
      for (const auto &a : args)
        cs.push_back(boolean(a));
      return op == "and" ? Expr::land(std::move(cs)) : Expr::lor(std::move(cs));
    }
    if (op == "=>") {
      need(2);
      Expr r = boolean(args.back());
      for (std::size_t i = args.size() - 1; i-- > 0;)
        r = Expr::implies(boolean(args[i]), r);
      return r;
    }
    if (op == "=" || op == "<=" || op == "<" || op == ">=" || op == ">") {
      need(2);
      std::vector<Value> vs;
      for (const auto &a : args)
        vs.push_back(value(a));
      bool is_bool = std::holds_alternative<Expr>(vs[0]);
      for (std::size_t i = 0; i < vs.size(); ++i)
        if (std::holds_alternative<Expr>(vs[i]) != is_bool)
          fail(PK::Sort, args[i], "mixed Boolean and arithmetic arguments to " + op);
      std::vector<Expr> parts;
      if (is_bool) {
        if (op != "=")
          fail(PK::Sort, e, "Boolean arguments to " + op);
        for (std::size_t i = 0; i + 1 < vs.size(); ++i)
          parts.push_back(Expr::iff(std::get<Expr>(vs[i]), std::get<Expr>(vs[i + 1])));
      } else {
        RawRel rel = op == "=" ? RawRel::EQ
                     : op == "<=" ? RawRel::LE
                     : op == "<"  ? RawRel::LT
                     : op == ">=" ? RawRel::GE
                                  : RawRel::GT;
        for (std::size_t i = 0; i + 1 < vs.size(); ++i)
          parts.push_back(compare(std::get<LinTerm>(vs[i]) - std::get<LinTerm>(vs[i + 1]), rel));
      }
      return Expr::land(std::move(parts));
    }
    if (op == "+") {
      LinTerm t;
      for (const auto &a : args)
        t += term(a);
      return t;
    }
    if (op == "-") {
      need(1);
      LinTerm t = term(args[0]);
      if (args.size() == 1)
        return -t;
      for (std::size_t i = 1; i < args.size(); ++i)
        t -= term(args[i]);
      return t;
    }
    if (op == "*") {
      need(1);
      LinTerm t = term(args[0]);
      for (std::size_t i = 1; i < args.size(); ++i) {
        LinTerm f = term(args[i]);
        if (t.is_constant())
          t = f * t.constant();
        else if (f.is_constant())
          t *= f.constant();
        else
          fail(PK::Sort, e, "nonlinear multiplication");
      }
      return t;
    }
    if (op == "/") {
      if (args.size() != 2)
        fail(PK::Syntax, e, "/ takes two arguments");
      LinTerm num = term(args[0]);
      Rational den = constant(args[1]);
      if (den.is_zero())
        fail(PK::Semantic, args[1], "division by zero");
      return num * den.inverse();
    }
    fail(PK::Syntax, e, "unsupported operator: " + op);
  }

  Expr compare(const LinTerm &diff, RawRel rel) {
    if (diff.is_constant())
      return Expr::constant(eval_ground(diff.constant(), rel));
    NormalizedAtom n = normalize_atom(diff, rel);
    PropId p = script_.props.intern_atom(n.atom);
    return Expr::literal({p, n.positive});
  }

  Script script_;
};

} // namespace

Script parse_script(std::string_view text) {
  Reader reader(text);
  return Elaborator().run(reader.read_all());
}

OmtProblem to_problem(const Script &script) {
  if (!script.cost)
    throw ParseError(PK::MissingObjective, 0, 0, "missing (minimize <id>) command");
  if (script.lb && script.ub && !(*script.lb < *script.ub))
    throw ParseError(PK::Semantic, 0, 0, "lower bound must be below upper bound");
  OmtProblem p;
  p.formula.vars = script.vars;
  p.formula.props = script.props;
  for (const auto &a : script.assertions)
    cnfize(a, p.formula.props, p.formula.clauses);
  p.cost = *script.cost;
  p.lb = script.lb;
  p.ub = script.ub;
  return p;
}

OmtProblem parse_problem(std::string_view text) { return to_problem(parse_script(text)); }

std::string smtlib_number(const Rational &r) {
  Rational a = r.abs();
  std::string body = a.is_integer() ? a.to_string()
                                    : "(/ " + mpz_class(a.num()).get_str() + " " +
                                          mpz_class(a.den()).get_str() + ")";
  return r.sign() < 0 ? "(- " + body + ")" : body;
}

namespace {

std::string print_term(const LinTerm &t, const VarTable &vars) {
  std::vector<std::string> parts;
  for (const auto &[v, c] : t.coeffs())
    parts.push_back(c == Rational(1) ? vars.name(v)
                                     : "(* " + smtlib_number(c) + " " + vars.name(v) + ")");
  if (!t.constant().is_zero() || parts.empty())
    parts.push_back(smtlib_number(t.constant()));
  if (parts.size() == 1)
    return parts[0];
  std::string s = "(+";
  for (const auto &p : parts)
    s += " " + p;
  return s + ")";
}

void print_expr(std::ostream &os, const Expr &e, const Script &s) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::True:
    os << "true";
    return;
  case K::False:
    os << "false";
    return;
  case K::Prop: {
    PropId p = e.prop_id();
    if (!s.props.is_atom(p)) {
      os << s.props.name(p);
      return;
    }
    const Atom &a = s.props.atom(p);
    static constexpr const char *ops[] = {"<=", "<", "="};
    os << "(" << ops[static_cast<int>(a.rel)] << " " << print_term(a.term.homogeneous(), s.vars)
       << " " << smtlib_number(-a.term.constant()) << ")";
    return;
  }
  default:
    break;
  }
  static constexpr const char *names[] = {"", "", "", "not", "and", "or", "=>", "="};
  os << "(" << names[static_cast<int>(e.kind())];
  for (const auto &c : e.children()) {
    os << " ";
    print_expr(os, c, s);
  }
  os << ")";
}

} // namespace

std::string print_script(const Script &script) {
  std::ostringstream os;
  for (const auto &c : script.comments)
    os << "; " << c << "\n";
  for (std::size_t v = 0; v < script.vars.size(); ++v)
    os << "(declare-fun " << script.vars.name(static_cast<VarId>(v)) << " () Real)\n";
  for (std::size_t p = 0; p < script.props.size(); ++p)
    if (script.props.kind(static_cast<PropId>(p)) == PropKind::Bool)
      os << "(declare-fun " << script.props.name(static_cast<PropId>(p)) << " () Bool)\n";
  if (script.lb)
    os << "(set-info :lb " << smtlib_number(*script.lb) << ")\n";
  if (script.ub)
    os << "(set-info :ub " << smtlib_number(*script.ub) << ")\n";
  for (const auto &a : script.assertions) {
    os << "(assert ";
    print_expr(os, a, script);
    os << ")\n";
  }
  if (script.cost)
    os << "(minimize " << script.vars.name(*script.cost) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

} // namespace optsmt
