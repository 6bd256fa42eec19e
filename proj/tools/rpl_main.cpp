#include <iostream>

#include "rpl/cli.hpp"

int main(int argc, char** argv) { return rpl::cli::run(argc, argv, std::cout, std::cerr); }
