#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace contextdb::tools {

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 violations found, 2 usage or parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contextdb::tools
