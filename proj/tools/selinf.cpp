#include <iostream>

#include "selinf/cli.hpp"

int main(int argc, char** argv) { return selinf::cli::run(argc, argv, std::cout, std::cerr); }
