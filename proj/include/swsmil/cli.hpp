#pragma once

#include <string>
#include <vector>

namespace swsmil::cli {

// Entry point shared by the binary and the tests. args excludes argv[0].
// Exit codes: 0 success, 2 usage/config/data error, 3 numeric failure.
int run(const std::vector<std::string>& args);

}  // namespace swsmil::cli
