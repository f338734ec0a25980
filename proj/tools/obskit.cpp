#include <iostream>

#include "obskit/cli.hpp"

int main(int argc, char** argv) { return obskit::run_cli(argc, argv, std::cout, std::cerr); }
