#pragma once

#include <iosfwd>

namespace voxelgraph {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,    // bad flags, missing subcommand
  kExitData = 2,     // unreadable or invalid inputs, configs, specs
  kExitRuntime = 3,  // training diverged or an unexpected failure
};

/// Entry point of the `voxelgraph` tool with injectable streams, so tests
/// can drive it in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace voxelgraph
