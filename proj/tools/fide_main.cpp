#include <vector>

#include "fide/cli.hpp"

int main(int argc, char** argv) {
    return fide::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
