#include <iostream>
#include <string>
#include <vector>

#include "cmdist/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cmdist::cli::run(args, std::cout, std::cerr);
}
