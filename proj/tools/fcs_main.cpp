#include <iostream>

#include "fcs/app.hpp"

int main(int argc, char** argv) { return fcs::app::run_cli(argc, argv, std::cout, std::cerr); }
