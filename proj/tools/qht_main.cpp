#include <iostream>

#include "qht/cli.hpp"

int main(int argc, char** argv) { return qht::cli::run(argc, argv, std::cout, std::cerr); }
