#include <string>
#include <vector>

#include "pinsync/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pinsync::cli::run_command(args);
}
