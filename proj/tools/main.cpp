#include "sepmem/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sepmem::run_cli(args, std::cout, std::cerr);
}
