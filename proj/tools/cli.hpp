#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cda_cli {

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 success, 2 rejected distribution, 3 numerical failure, 4 usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cda_cli
