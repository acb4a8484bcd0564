#include <iostream>

#include "mlebound/cli.hpp"

int main(int argc, char** argv) { return mlebound::cli::run(argc, argv, std::cout, std::cerr); }
