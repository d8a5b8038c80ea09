#include <iostream>

#include "fscap/app/cli.hpp"

int main(int argc, char** argv) { return fscap::app::run_cli(argc, argv, std::cout, std::cerr); }
