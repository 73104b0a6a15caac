#include <iostream>
#include <string>
#include <vector>

#include "somqe/cli.hpp"

int main(int argc, char** argv) {
  return somqe::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
