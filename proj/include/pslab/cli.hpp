#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pslab {

// Runs one CLI invocation (without the program name). Returns the process
// exit status: 0 success, 1 usage/validation error, 2 numerical failure.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pslab
