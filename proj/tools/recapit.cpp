#include <iostream>

#include "recapit/cli.hpp"

int main(int argc, char** argv) { return recapit::run_cli(argc, argv, std::cout, std::cerr); }
