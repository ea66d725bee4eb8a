#include <iostream>
#include <string>
#include <vector>

#include "confokit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return confokit::cli_dispatch(args, std::cout, std::cerr);
}
