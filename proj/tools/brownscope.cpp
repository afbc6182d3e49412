#include <iostream>

#include "brownscope/cli.hpp"

int main(int argc, char** argv) { return brownscope::run_cli(argc, argv, std::cout, std::cerr); }
