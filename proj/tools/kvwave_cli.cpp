#include <iostream>

#include "kvwave/cli.hpp"

int main(int argc, char** argv) { return kvwave::run_main(argc, argv, std::cout, std::cerr); }
