#include "budgetwise/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return budgetwise::run_cli(argc, argv, std::cout, std::cerr); }
