#include <iostream>

#include "stabkit/cli.h"

int main(int argc, char** argv) {
  return stabkit::RunCli(argc, argv, std::cout, std::cerr);
}
