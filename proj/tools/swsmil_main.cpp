#include <string>
#include <vector>

#include "swsmil/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return swsmil::cli::run(args);
}
