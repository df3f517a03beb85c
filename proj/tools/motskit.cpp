#include <iostream>

#include "mots/cli.hpp"

int main(int argc, char** argv) { return mots::cli::run(argc, argv, std::cout, std::cerr); }
