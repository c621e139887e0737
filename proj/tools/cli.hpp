#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gmn::cli {

/// Runs the `gmn` command line (`args[0]` is the program name). Returns the
/// process exit code: 0 on success, 1 on a runtime failure, 2 on bad usage.
/// Diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands `--config FILE`: every `key=value` line becomes `--key value`
/// unless `--key` already appears among the arguments.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace gmn::cli
