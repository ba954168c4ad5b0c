#include <iostream>

#include "lossfn/cli.hpp"

int main(int argc, char** argv) { return lossfn::run_cli(argc, argv, std::cout, std::cerr); }
