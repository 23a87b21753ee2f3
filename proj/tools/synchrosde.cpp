#include <iostream>
#include <string>
#include <vector>

#include "synchrosde/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return synchrosde::run(args, std::cout, std::cerr);
}
