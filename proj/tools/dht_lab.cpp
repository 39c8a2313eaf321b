#include <iostream>

#include "dht/cli.hpp"

int main(int argc, char** argv) { return dht::cli::run(argc, argv, std::cout, std::cerr); }
