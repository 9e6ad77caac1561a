#include <iostream>

#include "hjnet/cli.hpp"

int main(int argc, char** argv) { return hjnet::run_cli(argc, argv, std::cout, std::cerr); }
