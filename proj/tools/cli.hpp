#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ammlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInfeasible = 2;

// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "AMMLAB_OUTPUT_DIR";

// args excludes the program name. Results go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ammlab::cli
