#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace abmceg {

// Runs one CLI invocation (argv without the program name).  Returns 0 on
// success, 1 on usage errors, 2 on model/data validation or I/O failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace abmceg
