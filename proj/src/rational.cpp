#include "optsmt/rational.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>

namespace optsmt {

Rational::Rational(int64_t num, int64_t den)
    : value_(static_cast<long>(num), static_cast<unsigned long>(den < 0 ? -den : den)) {
  assert(den != 0 && "zero denominator");
  if (den < 0)
    value_ = -value_;
  value_.canonicalize();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      return false;
  return true;
}

} // namespace

Rational Rational::parse(std::string_view text) {
  bool negative = false;
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  mpq_class q;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto n = body.substr(0, slash), d = body.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d))
      throw std::invalid_argument("malformed rational: " + std::string(text));
    mpz_class den{std::string(d)};
    if (den == 0)
      throw std::invalid_argument("zero denominator: " + std::string(text));
    q = mpq_class(mpz_class(std::string(n)), den);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) ||
        (!fp.empty() && !all_digits(fp)))
      throw std::invalid_argument("malformed decimal: " + std::string(text));
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    std::string digits = std::string(ip) + std::string(fp);
    q = mpq_class(mpz_class(digits.empty() ? "0" : digits), scale);
  } else {
    if (!all_digits(body))
      throw std::invalid_argument("malformed integer: " + std::string(text));
    q = mpq_class(mpz_class(std::string(body)));
  }
  q.canonicalize();
  if (negative)
    q = -q;
  return Rational(std::move(q));
}

std::size_t Rational::hash() const {
  std::size_t h = mpz_fdiv_ui(value_.get_num_mpz_t(), 1000000007UL);
  h = h * 31 + (sign() < 0 ? 1 : 0);
  h = h * 1000003 + mpz_fdiv_ui(value_.get_den_mpz_t(), 998244353UL);
  return h;
}

std::ostream &operator<<(std::ostream &os, const Rational &r) {
  return os << r.to_string();
}

Rational min(const Rational &a, const Rational &b) { return b < a ? b : a; }
Rational max(const Rational &a, const Rational &b) { return a < b ? b : a; }

} // namespace optsmt
