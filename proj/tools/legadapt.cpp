#include "legadapt/cli/app.hpp"

#include <string>
#include <vector>

int main(int argc, char** argv)
{
    return legadapt::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
