#include <iostream>

#include "ralloc/cli.hpp"

int main(int argc, char** argv) { return ralloc::run_cli(argc, argv, std::cout, std::cerr); }
