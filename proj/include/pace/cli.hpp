#pragma once

#include <string>
#include <vector>

namespace pace {

// Entry point behind the `pace` binary, kept callable in-process so tests can
// drive every subcommand without spawning. Takes argv without the program
// name. Exit codes: 0 success, 1 usage, 2 config, 3 missing dependency,
// 4 runtime failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace pace
