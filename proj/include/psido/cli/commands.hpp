#pragma once

#include <string>
#include <vector>

namespace psido::cli {

/// Exit codes: 0 pass, 2 fail, 3 inconclusive (no stable spectral gap),
/// 1 usage or configuration error.
int run_command(const std::vector<std::string>& args);

int run_command(int argc, const char* const* argv);

} // namespace psido::cli
