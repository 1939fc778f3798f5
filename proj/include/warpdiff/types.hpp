#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "warpdiff/errors.hpp"

namespace warpdiff {

enum class ExecMode { aot, interpreter };
enum class StageProbe { none, external_profile };
enum class Stage { total, init, load, exec };
enum class RunStatus { ok, wrong_output, runtime_error, timeout };

const char* to_string(ExecMode m) noexcept;
const char* to_string(StageProbe p) noexcept;
const char* to_string(Stage s) noexcept;
const char* to_string(RunStatus s) noexcept;

/// One configured runtime setting: how to invoke a Wasm runtime binary.
/// `command_template` must contain `{wasm}` exactly once; `{args}` expands to
/// the case's argument list. Tokenization is shell-free: the template is
/// substituted, then split on whitespace.
struct RuntimeSpec {
  std::string id;
  std::string display_name;
  std::string command_template;
  ExecMode mode = ExecMode::aot;
  StageProbe stage_probe = StageProbe::none;

  void validate() const;
  bool operator==(const RuntimeSpec&) const = default;
};

/// One test program. `wasm_path` may be empty before the compile phase when
/// `source_path` plus a compiler configuration can produce it.
struct TestCase {
  std::string id;
  std::string source_path;
  std::string wasm_path;
  std::vector<std::string> args;
  std::optional<std::string> stdin_data;
  std::optional<std::string> expected_stdout_digest;  // sha256 hex
  int expected_exit_code = 0;
  std::vector<std::string> tags;

  void validate() const;
  bool operator==(const TestCase&) const = default;
};

/// Wall-clock seconds for one run. Stage fields are meaningful only when
/// `stages_present`; the three stages must then sum to the total within 5%
/// (external profiler timestamps leave small gaps between stages).
struct StageTiming {
  double init_s = 0.0;
  double load_s = 0.0;
  double exec_s = 0.0;
  double total_s = 0.0;
  bool stages_present = false;

  void validate() const;
  bool operator==(const StageTiming&) const = default;
};

/// One pre-averaging sample: a single execution of (case, runtime).
/// `status == ok` means the exit code matched the case's expectation and the
/// stdout digest matched when an expected digest exists.
struct RunRecord {
  std::string case_id;
  std::string runtime_id;
  int rep_index = 0;
  StageTiming timing;
  int exit_code = 0;
  std::string stdout_digest;
  RunStatus status = RunStatus::ok;

  // Diagnostics, not part of the measurement contract.
  std::optional<double> cpu_s;      // utime + stime when the platform reports it
  double mono_start_s = 0.0;        // monotonic timestamps bracketing the run
  double mono_end_s = 0.0;
  std::string failure_stdout;       // captured only for non-ok runs
  std::string failure_stderr;

  bool operator==(const RunRecord&) const = default;
};

/// cases x runtime-settings matrix of mean times, row-major. Each row is one
/// case's time vector. Canonical form has rows and columns sorted by id.
struct TimingMatrix {
  Stage stage = Stage::total;
  std::vector<std::string> case_ids;
  std::vector<std::string> runtime_ids;
  std::vector<double> values;  // case_ids.size() * runtime_ids.size()

  std::size_t n_cases() const { return case_ids.size(); }
  std::size_t n_runtimes() const { return runtime_ids.size(); }

  double at(std::size_t row, std::size_t col) const {
    return values[row * runtime_ids.size() + col];
  }
  double& at(std::size_t row, std::size_t col) {
    return values[row * runtime_ids.size() + col];
  }

  std::optional<std::size_t> case_index(const std::string& case_id) const;
  std::optional<std::size_t> runtime_index(const std::string& runtime_id) const;
  std::vector<double> row(std::size_t index) const;

  bool operator==(const TimingMatrix&) const = default;
};

/// Canonicalizes the matrix (rows and columns sorted by id) and checks the
/// type invariants. Total-stage matrices must be strictly positive; per-stage
/// matrices allow zeros but every row needs at least one positive entry.
/// Idempotent: validating a validated matrix returns it unchanged.
TimingMatrix validate_matrix(TimingMatrix m);

}  // namespace warpdiff
