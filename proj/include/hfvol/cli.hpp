#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hfvol::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kData = 3,
    kNonConvergence = 4,
    kInternal = 5,
};

/// Environment variable holding the default --output-dir.
inline constexpr const char* kOutputDirEnv = "HFVOL_OUTPUT_DIR";

/// Runs one subcommand. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

} // namespace hfvol::cli
