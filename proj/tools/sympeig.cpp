#include <iostream>

#include "sympen/cli.hpp"

int main(int argc, char** argv) {
    return sympen::cli::run(argc, argv, std::cout, std::cerr);
}
