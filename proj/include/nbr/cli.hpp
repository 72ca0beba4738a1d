#pragma once

#include <string>
#include <vector>

namespace nbr::cli {

// Runs one toolkit subcommand. Returns 0 on success, 1 on usage errors,
// 2 on data errors.
int dispatch(const std::vector<std::string>& args);

}  // namespace nbr::cli
