#include <iostream>

#include "gradreg_cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gradreg::cli::main_with_args(args, std::cout, std::cerr);
}
