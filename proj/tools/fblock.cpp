#include <iostream>
#include <string>
#include <vector>

#include "fblock/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fblock::run_cli(args, std::cout, std::cerr);
}
