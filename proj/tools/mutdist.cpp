#include <iostream>

#include "mutdist/cli.hpp"

int main(int argc, char** argv) { return mutdist::cli::run_subcommand(argc, argv, std::cout, std::cerr); }
