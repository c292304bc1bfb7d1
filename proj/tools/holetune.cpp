#include "holetune/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return holetune::runCli(args, std::cout, std::cerr);
}
