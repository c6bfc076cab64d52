#include <iostream>

#include "attman/cli.hpp"

int main(int argc, char** argv) { return attman::cli::dispatch(argc, argv, std::cout, std::cerr); }
