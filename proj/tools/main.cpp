#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return manifold_descent::cli::run_cli(args, std::cout, std::cerr);
}
