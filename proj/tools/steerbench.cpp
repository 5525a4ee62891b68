#include <iostream>
#include <string>
#include <vector>

#include "steerbench/pipeline/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return steerbench::pipeline::run_cli(args, std::cout, std::cerr);
}
