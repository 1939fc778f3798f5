#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpdiff/errors.hpp"

namespace warpdiff {

struct ProcessRequest {
  std::vector<std::string> argv;
  std::optional<std::string> stdin_data;
  double timeout_s = 300.0;
  std::map<std::string, std::string> extra_env;

  /// Captured stdout/stderr are truncated at this many bytes; the sink below
  /// still sees every byte.
  std::size_t capture_limit = 16 * 1024 * 1024;

  /// Called with every stdout chunk as it arrives (e.g. to digest the full
  /// stream without buffering it).
  std::function<void(const char*, std::size_t)> stdout_sink;
};

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool signaled = false;
  int term_signal = 0;
  std::string stdout_data;
  std::string stderr_data;
  double wall_s = 0.0;             // monotonic, spawn to exit
  std::optional<double> cpu_s;     // child utime + stime
  double mono_start_s = 0.0;
  double mono_end_s = 0.0;
};

/// Spawns argv[0] directly (no shell), feeds stdin, captures stdout/stderr,
/// and enforces the timeout with SIGKILL. Throws Error(spawn_failure) when
/// the binary is missing or not executable.
ProcessResult run_process(const ProcessRequest& request);

/// Whitespace tokenizer used for command templates after placeholder
/// substitution. No quoting or shell interpretation.
std::vector<std::string> split_command(const std::string& command);

/// Seconds on the same monotonic clock run_process stamps results with.
double monotonic_now_s();

}  // namespace warpdiff
