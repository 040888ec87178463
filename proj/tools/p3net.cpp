#include <iostream>

#include "p3net/cli.hpp"

int main(int argc, char** argv) { return p3net::cli::run(argc, argv, std::cout, std::cerr); }
