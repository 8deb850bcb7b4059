#pragma once

#include <string>
#include <vector>

namespace msgt::cli {

/// Dispatches one CLI invocation. `args` excludes the program name.
/// Exit codes: 0 success, 1 analysis failure, 2 usage or parse error.
int run(const std::vector<std::string>& args);

}  // namespace msgt::cli
