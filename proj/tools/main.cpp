#include <iostream>
#include <string>
#include <vector>

#include "optsmt/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return optsmt::run_cli(args, std::cout, std::cerr);
}
