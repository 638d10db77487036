#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qclone::cli {

// Runs one CLI invocation. Exit codes: 0 success, 1 invalid input,
// 2 numerical failure. Output is byte-deterministic for fixed inputs and
// seed.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace qclone::cli
