#include <iostream>

#include "halfwave/cli.hpp"

int main(int argc, char** argv) { return halfwave::main_entry(argc, argv, std::cout, std::cerr); }
