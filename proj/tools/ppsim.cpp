#include <iostream>

#include "ppsim/cli.hpp"

int main(int argc, char** argv) { return ppsim::cli_dispatch(argc, argv, std::cout, std::cerr); }
