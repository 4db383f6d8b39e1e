#include <iostream>

#include "bloombench/cli.hpp"

int main(int argc, char** argv) { return bloombench::cli::run(argc, argv, std::cout, std::cerr); }
