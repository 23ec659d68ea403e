#include <iostream>
#include <string>
#include <vector>

#include "orthant/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return orthant::cli::run(args, std::cout, std::cerr);
}
