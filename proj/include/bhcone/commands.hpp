#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bhcone/config.hpp"

namespace bhcone {

enum class Command { ed, verify, qmc, identities };

Command parse_command(std::string_view name);
std::string_view to_string(Command c);

inline constexpr int kReportSchemaVersion = 1;

inline constexpr int kExitPassed = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitWriteFailed = 3;

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct CommandResult {
  int exit_status = kExitPassed;
  std::vector<Artifact> artifacts;  // the JSON report comes first

  const Artifact* find(std::string_view name) const;
};

inline constexpr std::string_view kTraceHeader = "step,estimator,block_error,total_weight";
inline constexpr std::string_view kTrotterHeader = "steps,tau,error";

// Runs the command and renders every artifact in memory; nothing touches the
// file system. Exit status 0 iff every verdict passes. Module errors come back
// as an error.json artifact with kExitError.
CommandResult run_command(Command command, const ExperimentConfig& config);

// Structured error report for failures outside run_command (bad config).
CommandResult error_result(std::string_view command, std::string_view kind, const std::string& message,
                           const std::vector<std::string>& details = {});

class ReportWriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes every artifact under dir, creating it if needed.
void emit_report(const CommandResult& result, const std::filesystem::path& dir);

}  // namespace bhcone
