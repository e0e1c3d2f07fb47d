#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return holo::cli::run_command(args, std::cout, std::cerr, std::cin);
}
