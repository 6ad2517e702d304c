#pragma once

#include <string>
#include <vector>

namespace ark {

/// Whole CLI as a function so tests can drive it in-process. Returns the
/// process exit code: 0 ok, 1 parse/semantic/usage, 2 validation failure,
/// 3 numeric failure.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

}  // namespace ark
