#include "cli.hpp"

int main(int argc, char** argv)
{
    return sphkura::cli::cli_main(argc, argv);
}
