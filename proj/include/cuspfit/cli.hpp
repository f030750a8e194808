#pragma once

#include <string>
#include <vector>

namespace cuspfit {

/// Entry point of the command-line driver. `args` mirrors argv including
/// the program name. Returns the process exit code: 0 on success, 1 when
/// a fit fails, 2 on usage or input errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace cuspfit
