#include <iostream>

#include "safe_explore/cli.hpp"

int main(int argc, char** argv) { return safe_explore::cli_main(argc, argv, std::cout, std::cerr); }
