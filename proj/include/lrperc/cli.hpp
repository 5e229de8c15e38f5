#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lrp::cli {

enum ExitCode : int { kOk = 0, kBadFlags = 2, kPrecondition = 3, kBracketFailure = 4, kIoFailure = 5 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// key = value lines, '#' starts a comment. Keys are flag names without dashes. Throws
/// ConfigError naming the line on malformed lines; unknown keys are checked by the caller.
std::vector<std::pair<std::string, std::string>> load_config(const std::filesystem::path& path);

struct Artifact {
  std::string name;
  std::string bytes;
};

/// Writes each artifact atomically (temp file + rename) and then manifest.json, with the
/// FNV-1a digest of every artifact added under "outputs". Returns the final manifest.
nlohmann::json emit_outputs(const std::vector<Artifact>& artifacts, nlohmann::json manifest,
                            const std::filesystem::path& dir);

/// args excludes the program name. Returns the process exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrp::cli
