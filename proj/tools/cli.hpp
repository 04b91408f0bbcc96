#pragma once

// Command-line front end. `run` is the whole program minus process exit, so
// tests can drive it in-process.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dynpov::cli {

/// Exit code for any reported failure.
inline constexpr int kFailureExit = 2;

/// Runs one invocation; `args` excludes the program name. Errors are written
/// to `err` as {"error": Kind, "message": ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:step" (inclusive, step > 0), a comma list, or empty for no points.
std::vector<double> parse_grid(std::string_view text);

/// "first:last" calendar years.
std::pair<int, int> parse_window(std::string_view text);

/// File name and full contents.
using OutputFile = std::pair<std::string, std::string>;

/// Creates `dir` if needed and writes every file through a temporary name
/// followed by a rename.
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

}  // namespace dynpov::cli
