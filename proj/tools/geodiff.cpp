#include <iostream>
#include <string>
#include <vector>

#include "geodiff/cli/commands.hpp"

int main(int argc, char** argv) {
  return geodiff::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
