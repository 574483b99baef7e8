#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace autojournal {

struct ProcessResult {
  int exit_code = 0;
  std::string output;  // combined stdout + stderr
};

// Resolves a program name against PATH (names containing '/' are used as
// given). Returns nullopt unless the result is an executable regular file.
std::optional<std::filesystem::path> find_executable(const std::string& program);

// Directory holding the running executable, if it can be determined.
std::optional<std::filesystem::path> current_executable_dir();

// Runs argv[0] with the given arguments, blocking until it exits.
// Throws Error(EncoderUnavailable) if the process cannot be spawned.
ProcessResult run_process(const std::vector<std::string>& argv);

}  // namespace autojournal
