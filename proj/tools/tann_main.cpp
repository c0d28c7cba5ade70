#include <iostream>

#include "tann/cli.hpp"

int main(int argc, char** argv) { return tann::cli::run(argc, argv, std::cout, std::cerr); }
