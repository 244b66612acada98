#include <iostream>

#include "zgap/cli.hpp"

int main(int argc, char** argv) { return zgap::cli::run(argc, argv, std::cout, std::cerr); }
