#include <iostream>
#include <string>
#include <vector>

#include "exofab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return exofab::cli::run(args, std::cout, std::cerr);
}
