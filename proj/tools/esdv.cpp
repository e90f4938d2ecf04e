#include <iostream>

#include "esdv/cli.hpp"

int main(int argc, char **argv) {
  return esdv::cli::run(argc, argv, std::cout, std::cerr);
}
