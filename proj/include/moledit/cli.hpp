#pragma once

namespace moledit {

// Entry point for the moledit command-line tool.  Returns the process exit
// code: 0 success, 1 data errors, 2 usage errors.
int run_cli(int argc, char** argv);

}  // namespace moledit
