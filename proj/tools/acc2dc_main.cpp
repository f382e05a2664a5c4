#include <iostream>

#include "acc2dc/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return acc2dc::run(args, std::cout, std::cerr);
}
