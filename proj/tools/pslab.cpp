#include <iostream>
#include <string>
#include <vector>

#include "pslab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pslab::cli_run(args, std::cout, std::cerr);
}
