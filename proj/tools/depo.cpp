#include <iostream>

#include "depo/cli.hpp"

int main(int argc, char** argv) { return depo::cli::run(argc, argv, std::cout, std::cerr); }
