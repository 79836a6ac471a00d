#include "optsmt/dimacs.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace optsmt::sat {

DimacsCnf parse_dimacs(std::string_view text) {
  DimacsCnf cnf;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  long declared = 0;
  std::vector<Lit> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == 'c' || tok[0] == '%')
      continue;
    if (tok == "p") {
      std::string fmt;
      if (header || !(ls >> fmt >> cnf.num_vars >> declared) || fmt != "cnf" || cnf.num_vars < 0)
        throw std::invalid_argument("bad DIMACS header");
      header = true;
      continue;
    }
    if (!header)
      throw std::invalid_argument("clause before DIMACS header");
    do {
      char *end = nullptr;
      long k = std::strtol(tok.c_str(), &end, 10);
      if (*end != '\0')
        throw std::invalid_argument("bad DIMACS literal '" + tok + "'");
      if (k == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      long v = k < 0 ? -k : k;
      if (v > cnf.num_vars)
        throw std::invalid_argument("DIMACS variable out of range");
      current.push_back(Lit::make(static_cast<Var>(v - 1), k < 0));
    } while (ls >> tok);
  }
  if (!current.empty())
    cnf.clauses.push_back(std::move(current));
  return cnf;
}

std::string to_dimacs(const DimacsCnf &cnf) {
  std::ostringstream out;
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto &c : cnf.clauses) {
    for (Lit l : c)
      out << (l.negative() ? -(l.var() + 1) : l.var() + 1) << ' ';
    out << "0\n";
  }
  return out.str();
}

} // namespace optsmt::sat
