#include <iostream>

#include "markov_uq/cli/commands.hpp"

int main(int argc, char** argv) {
  return markov_uq::cli::run_cli(argc, argv, std::cout, std::cerr);
}
