#include "gptsteer/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const auto result = gptsteer::run_cli(std::vector<std::string>(argv + 1, argv + argc));
    std::cout << result.out << std::flush;
    std::cerr << result.err;
    return result.exit_code;
}
