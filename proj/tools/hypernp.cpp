#include <iostream>

#include "hypernp/cli/commands.hpp"

int main(int argc, char** argv) { return hypernp::cli::run(argc, argv, std::cout, std::cerr); }
