#include <iostream>

#include "amodelay_cli/commands.hpp"

int main(int argc, char** argv) { return amodelay::cli::run_cli(argc, argv, std::cout, std::cerr); }
