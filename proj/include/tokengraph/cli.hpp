#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tokengraph
{

// Runs one CLI invocation; `args` excludes the program name. Errors are
// reported as a JSON object on `err` with a nonzero return value.
int run_cli(std::vector<std::string> const &args, std::istream &in,
            std::ostream &out, std::ostream &err);

int run_cli(int argc, char **argv);

} // namespace tokengraph
