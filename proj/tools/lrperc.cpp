#include <iostream>
#include <string>
#include <vector>

#include "lrperc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lrp::cli::run_command(args, std::cout, std::cerr);
}
