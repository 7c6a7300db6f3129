#include <string>
#include <vector>

#include "truncvar/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return truncvar::cli::run(args);
}
