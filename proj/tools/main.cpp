#include "rplm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rplm::cli::main(argc, argv, std::cout, std::cerr); }
