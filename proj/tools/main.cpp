#include <iostream>
#include <vector>

#include "ghsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ghsim::run_cli(args, std::cout, std::cerr);
}
