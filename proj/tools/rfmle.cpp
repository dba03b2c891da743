#include <iostream>
#include <string>
#include <vector>

#include "rfmle/cli.hpp"

int main(int argc, char** argv) {
  return rfmle::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
