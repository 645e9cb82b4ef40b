#include <iostream>
#include <string>
#include <vector>

#include "tubecheck/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tubecheck::cli_main(args, std::cout, std::cerr);
}
