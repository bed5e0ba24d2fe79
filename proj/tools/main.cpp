#include <iostream>
#include <string>
#include <vector>

#include "proxkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return proxkit::run_cli(args, std::cout, std::cerr);
}
