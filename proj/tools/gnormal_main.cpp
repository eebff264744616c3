#include <iostream>
#include <string>
#include <vector>

#include "gnormal/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return gnormal::cli::run(args, std::cout, std::cerr);
}
