#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynspeckle::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 on success, 2 on any error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynspeckle::cli
