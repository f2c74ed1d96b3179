#include <iostream>

#include "spinbath/cli.hpp"

int main(int argc, char** argv) {
    return spinbath::cli::run_cli(argc, argv, std::cout, std::cerr);
}
