#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "kovtop_cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kovtop::cli::run(args, std::cout, std::cerr,
                          std::getenv(kovtop::cli::kSeedEnv));
}
