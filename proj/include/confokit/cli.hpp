#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confokit {

// Full command-line surface. Exit codes: 0 success, 1 validation/usage
// error, 2 resource exhaustion. Diagnostics go to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confokit
