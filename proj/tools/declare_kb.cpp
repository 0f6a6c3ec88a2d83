#include <iostream>

#include "dkb/cli.hpp"

int main(int argc, char** argv) { return dkb::run_cli(argc, argv, std::cout, std::cerr); }
