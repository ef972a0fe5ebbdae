#include <iostream>
#include <string>
#include <vector>

#include "vpgeo/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const vpgeo::CommandOutcome outcome = vpgeo::run(args, std::cout, std::cerr);
  return outcome.exit_code;
}
