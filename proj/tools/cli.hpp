#pragma once

#include <string>
#include <vector>

namespace mamprop::cli {

/// Runs one CLI invocation; args exclude the program name. Returns the exit code.
int run(const std::vector<std::string>& args);

}  // namespace mamprop::cli
