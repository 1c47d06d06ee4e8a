#include "pruneclust/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pruneclust::run_cli(argc, argv, std::cout, std::cerr); }
