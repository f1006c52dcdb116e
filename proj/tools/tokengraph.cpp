#include <tokengraph/cli.hpp>

int main(int argc, char **argv)
{
    return tokengraph::run_cli(argc, argv);
}
