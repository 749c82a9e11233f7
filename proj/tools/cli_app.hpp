#pragma once

namespace ksc::cli {

// Parses arguments and runs one experiment command. Returns the process
// exit code: 0 on success, 1 on bad arguments or runtime failure, 2 when a
// check command finds a disagreement.
int run_cli(int argc, char** argv);

}  // namespace ksc::cli
