#include <iostream>
#include <string>
#include <vector>

#include "pfsm/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return pfsm::cli::run(args, std::cout, std::cerr);
}
