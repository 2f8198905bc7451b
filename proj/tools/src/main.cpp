#include <iostream>

#include "moran/cli.hpp"

int main(int argc, char** argv) { return moran::cli::run(argc, argv, std::cout); }
