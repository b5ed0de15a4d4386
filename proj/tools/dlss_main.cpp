#include <string>
#include <vector>

#include "dlss/cli.hpp"

int main(int argc, char** argv) {
    return dlss::cli::main(std::vector<std::string>(argv + 1, argv + argc));
}
