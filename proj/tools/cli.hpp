#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace llmwiki::cli {

/// Runs one command line (without the program name). Returns 0 on success,
/// 1 on operational errors and 2 on usage errors.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace llmwiki::cli
