#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsm::cli {

enum ExitStatus : int { kOk = 0, kFindings = 1, kUsage = 2 };

struct Io {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    bool interactive = false;  // print REPL prompts
};

/// Parses `args` (without the program name) and runs one subcommand.
int runCli(const std::vector<std::string>& args, Io io);

} // namespace tsm::cli
