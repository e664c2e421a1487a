#pragma once

// Command dispatch for the gptsteer tool, callable in-process so tests can
// compare outputs byte for byte.

#include <string>
#include <vector>

namespace gptsteer {

enum ExitCode : int { kHolds = 0, kRefuted = 1, kInputError = 2, kInternalError = 3 };

struct CommandOutput {
    int exit_code = kInputError;
    std::string out;
    std::string err;
};

/// args excludes the program name. Never throws.
CommandOutput run_cli(const std::vector<std::string>& args);

/// Sets the stderr log level from GPTSTEER_LOG (off, error, warn, info, debug; default warn).
void configure_logging();

}  // namespace gptsteer
