#include "gmbe/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gmbe::run_cli(argc, argv, std::cout, std::cerr); }
