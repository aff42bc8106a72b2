#include <iostream>

#include "geodyn/cli.hpp"

int main(int argc, char** argv) { return geodyn::run_cli(argc, argv, std::cout, std::cerr); }
