#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace healthgame {

// Exit status contract of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitIo = 3 };

// Relative --out/--graph paths are resolved against this directory when set.
inline constexpr const char* kOutDirEnv = "HEALTHGAME_OUT_DIR";

/// Entry point shared by the binary and the tests. `args` excludes the
/// program name. Machine-readable results go to files named by flags; the
/// human summary goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace healthgame
