#include <iostream>
#include <string>
#include <vector>

#include "mixpois/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mixpois::cli::run(args, std::cout, std::cerr);
}
