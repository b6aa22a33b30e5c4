#include <iostream>
#include <string>
#include <vector>

#include "maxattn/cli/runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return maxattn::cli::run_main(args, std::cout, std::cerr);
}
