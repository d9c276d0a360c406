#include <iostream>

#include "stlf/cli.hpp"

int main(int argc, char** argv) { return stlf::cli::run_command(argc, argv, std::cout, std::cerr); }
