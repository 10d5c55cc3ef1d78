#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace debunk {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitInput = 2,
    kExitMissing = 3,
    kExitMalformed = 4,
    kExitBackend = 5,
};

/// Runs one `debunk` invocation; `args` excludes the program name.
/// Diagnostics go to `err` as a single line "debunk: error[<class>]: <text>".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The diagnostic line for an error of class `cls`, without trailing newline.
std::string error_line(std::string_view cls, std::string_view message);

}  // namespace debunk
