#include <iostream>
#include <string>
#include <vector>

#include "w2s/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return w2s::cli_main(args, std::cout, std::cerr);
}
