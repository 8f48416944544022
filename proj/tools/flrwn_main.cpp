#include <iostream>

#include "flrwn/cli.hpp"

int main(int argc, char** argv) { return flrwn::run_cli(argc, argv, std::cout, std::cerr); }
