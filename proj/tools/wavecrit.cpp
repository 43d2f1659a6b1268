#include <iostream>

#include "wavecrit/cli.hpp"

int main(int argc, char** argv) {
  return wavecrit::run_cli(argc, argv, std::cout, std::cerr);
}
