#include <iostream>
#include <string>
#include <vector>

#include "eprb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return eprb::cli::run(args, std::cout, std::cerr);
}
