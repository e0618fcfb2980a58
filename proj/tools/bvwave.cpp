#include "bvwave/driver.hpp"

#include <iostream>

int main(int argc, char** argv) { return bvwave::cli_main(argc, argv, std::cout, std::cerr); }
