#include <iostream>

#include "opcalc/cli.hpp"

int main(int argc, char** argv) {
  auto outcome = opcalc::cli::run(std::vector<std::string>(argv + 1, argv + argc));
  std::cout << outcome.out;
  std::cerr << outcome.err;
  return outcome.code;
}
