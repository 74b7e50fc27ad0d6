#include <iostream>
#include <string>
#include <vector>

#include "cpscan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cpscan::run_cli(args, std::cout, std::cerr);
}
