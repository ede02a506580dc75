#include <iostream>
#include <string>
#include <vector>

#include "utilrank/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return utilrank::run_cli(args, std::cout, std::cerr);
}
