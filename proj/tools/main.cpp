#include <iostream>
#include <string>
#include <vector>

#include "tightclass/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tightclass::cli::run(args, std::cout, std::cerr);
}
