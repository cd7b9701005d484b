#include <iostream>
#include <string>
#include <vector>

#include "streampca/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return streampca::cli::run_cli(args, std::cout, std::cerr);
}
