#include <iostream>

#include "rtlopt/cli/cli.h"

int main(int argc, char** argv) {
  return rtlopt::cli::RunCli(argc, argv, std::cout, std::cerr);
}
