#include <iostream>

#include "shotguard/cli.hpp"

int main(int argc, char** argv) { return shotguard::cli::run(argc, argv, std::cout, std::cerr); }
