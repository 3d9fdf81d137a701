#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lwo::cli {

enum Exit : int { ok = 0, usage = 1, verification = 2, resource = 3 };

// Runs one command line (without the program name). Artifacts go to --output
// when given, written to a temporary file and renamed into place, and to `out`
// otherwise; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lwo::cli
