#include "photonwf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return photonwf::cli::run(argc, argv, std::cout, std::cerr); }
