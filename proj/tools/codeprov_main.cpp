#include <string>
#include <vector>

#include "codeprov/cli.hpp"

int main(int argc, char** argv) {
    return codeprov::cli::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
