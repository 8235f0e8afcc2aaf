#include <iostream>

#include "cbmf/cli.hpp"

int main(int argc, char** argv) {
  return cbmf::run_cli(argc, argv, std::cout, std::cerr);
}
