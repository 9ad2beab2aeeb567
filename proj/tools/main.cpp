#include <iostream>
#include <string>
#include <vector>

#include "qclab/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return qclab::run_cli(std::move(args), std::cout, std::cerr);
}
