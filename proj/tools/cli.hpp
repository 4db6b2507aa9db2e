#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ellcert::cli {

/// Exit status: 0 success, 1 input or solver error, 2 an asserted inequality failed.
enum Status : int { ok = 0, failure = 1, violated = 2 };

/// Runs one command line (args excludes the program name). Tables go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ellcert::cli
