#include <iostream>
#include <string>
#include <vector>

#include "relq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relq::runCli(args, std::cin, std::cout, std::cerr);
}
