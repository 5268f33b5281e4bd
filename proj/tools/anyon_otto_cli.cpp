#include "anyon_otto/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return anyon_otto::cli::run_cli(argc, argv, std::cout, std::cerr);
}
