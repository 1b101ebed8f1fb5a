#include <iostream>

#include "sessium/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sessium::run_cli(args, std::cout, std::cerr);
}
