#include <iostream>
#include <string>
#include <vector>

#include "kresling/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return kresling::cli_dispatch(args, std::cout, std::cerr);
}
