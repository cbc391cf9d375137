#include "lupisvm/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
    return lupisvm::run_cli(argc, argv, std::cout, std::cerr);
}
