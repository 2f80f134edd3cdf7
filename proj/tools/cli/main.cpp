#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return dapca::cli::run(argc, argv, std::cout, std::cerr); }
