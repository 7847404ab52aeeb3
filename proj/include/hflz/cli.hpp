#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hflz {

// Exit codes of the command-line tool.
enum ExitCode { kExitValid = 0, kExitInvalid = 1, kExitUnknown = 2, kExitError = 3 };

// args excludes the program name. A file argument "-" reads `in`.
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace hflz
