#include <iostream>

#include "voxelgraph/cli.hpp"

int main(int argc, char** argv) {
  return voxelgraph::run_cli(argc, argv, std::cout, std::cerr);
}
