#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace egoview::cli {

inline constexpr const char* kOutputDirEnv = "EGOVIEW_OUTPUT_DIR";
inline constexpr const char* kReportSchema = "# egoview run-manifest report v1";

/// Dispatches `args` (without the program name). Results go to `out`; a
/// failure prints one JSON line {"error": <code>, "message": ...} to `err`
/// and returns nonzero (1 = runtime error, 2 = usage error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace egoview::cli
