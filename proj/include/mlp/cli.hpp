#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlp {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitSchema = 2, kExitModel = 3 };

// Runs one command line (without the program name). Results go to `out`
// unless an output file is given; diagnostics go to `err`. Returns 0 on
// success, 2 for unreadable or invalid input (schema, I/O, usage) and 3 when
// a model step fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlp
