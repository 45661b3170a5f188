#include "icuharm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return icuharm::run_cli(args, icuharm::process_env(), std::cout, std::cerr);
}
