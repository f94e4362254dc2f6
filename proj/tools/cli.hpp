#pragma once

#include <string>
#include <vector>

namespace demo2prog {

/// Entry point shared by the binary and the CLI tests. Returns the process
/// exit code: 0 success, 2 config error, 3 missing upstream input,
/// 4 numerical failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace demo2prog
