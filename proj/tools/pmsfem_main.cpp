#include "pmsfem/harness/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pmsfem::harness::run_cli(argc, argv, std::cout, std::cerr); }
