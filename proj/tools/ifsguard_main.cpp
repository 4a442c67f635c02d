#include <iostream>
#include <string>
#include <vector>

#include "ifsguard/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ifsguard::cli::run(args, std::cout, std::cerr);
}
