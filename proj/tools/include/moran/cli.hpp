#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace moran::cli {

/// Exit codes: 0 success, 1 usage error, 2 module error, 3 validation failure.
/// Errors are written to `out` as a JSON object with an "error" member.
int run(int argc, const char* const* argv, std::ostream& out);
/// Same, with argv[0] implied.
int run(const std::vector<std::string>& args, std::ostream& out);

const char* version();

}  // namespace moran::cli
