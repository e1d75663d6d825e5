#include "streamforge/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return streamforge::cli::run(argc, argv, std::cout, std::cerr); }
