#include <iostream>

#include "fastgauss/cli.hpp"

int main(int argc, char** argv) { return fastgauss::cli::run(argc, argv, std::cout, std::cerr); }
