#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return litcp::cli_run(argc, argv, std::cout, std::cerr); }
