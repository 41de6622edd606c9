#include "perchsim/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    return perchsim::cli_main(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
