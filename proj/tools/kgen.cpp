#include <iostream>
#include <string>
#include <vector>

#include "kgen/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv, argv + argc);
  return kgen::run_cli(args, std::cout, std::cerr);
}
