#include <iostream>

#include "markmle/cli.hpp"

int main(int argc, char** argv) { return markmle::cli::run(argc, argv, std::cout, std::cerr); }
