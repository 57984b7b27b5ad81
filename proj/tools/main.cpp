#include <iostream>
#include <string>
#include <vector>

#include "fairshare/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return fairshare::run_cli(args, std::cout, std::cerr);
}
