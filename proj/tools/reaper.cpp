#include <iostream>

#include "reaper/cli.hpp"

int main(int argc, char** argv) {
  return reaper::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
