#include <iostream>
#include <string>
#include <vector>

#include "pendlim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pendlim::cli::run(args, std::cout, std::cerr);
}
