#include <iostream>
#include <string>
#include <vector>

#include "healthgame/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return healthgame::run_cli(args, std::cout, std::cerr);
}
