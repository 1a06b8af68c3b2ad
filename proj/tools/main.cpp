#include <string>
#include <vector>

#include "bcfw/cli.hpp"

int main(int argc, char** argv) {
    return bcfw::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
