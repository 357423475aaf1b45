#pragma once

namespace graphssl::cli {

// Entry point of the graphssl tool. Returns the process exit code: 0 success, 1 usage or
// input error, 2 numerical failure or unsupported configuration.
int run(int argc, const char* const* argv);

}  // namespace graphssl::cli
