#include <iostream>

#include "oarseg/commands.hpp"

int main(int argc, char** argv) { return oarseg::cli::run(argc, argv, std::cout, std::cerr); }
