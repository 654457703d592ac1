#include <iostream>

#include "neurotrig/cli.hpp"

int main(int argc, char** argv) { return neurotrig::run_cli(argc, argv, std::cout, std::cerr); }
