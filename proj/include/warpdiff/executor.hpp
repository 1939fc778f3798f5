#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpdiff/types.hpp"

namespace warpdiff {

enum class Interleaving { by_case, by_runtime };
enum class ExclusionReason { wrong_output, runtime_error, timeout, compile_failure };

const char* to_string(Interleaving i) noexcept;
const char* to_string(ExclusionReason r) noexcept;

/// What to run and how often. Warmup runs absorb filesystem-cache cold starts
/// and are discarded; set warmup_runs to 0 for strict repetition-only data.
struct ExecutionPlan {
  std::vector<RuntimeSpec> runtimes;
  std::vector<TestCase> cases;
  int repetitions = 10;
  double timeout_s = 300.0;
  Interleaving interleaving = Interleaving::by_case;
  int warmup_runs = 1;

  void validate() const;
};

/// Why a case was dropped from the corpus. Exclusion is corpus-wide: a case
/// failing anywhere is removed from every runtime's column.
struct ExclusionRecord {
  std::string case_id;
  ExclusionReason reason = ExclusionReason::runtime_error;
  std::optional<std::string> runtime_id;
  std::string detail;

  bool operator==(const ExclusionRecord&) const = default;
};

/// Environment variable naming the per-run stage profile file. When a
/// runtime's stage_probe is external_profile, the executor points this at a
/// fresh path before each run; an external profiler (or wrapper script) may
/// write `{"marks": [{"label": "init_end"|"load_end", "t_s": ...}]}` there.
inline constexpr const char* kProfileFileEnv = "WARPDIFF_PROFILE_FILE";

/// Substituted, whitespace-split argv for running a case under a runtime.
std::vector<std::string> build_argv(const RuntimeSpec& rt, const TestCase& tc);

/// Runs warmup_runs + repetitions child processes strictly sequentially
/// (a process-wide lock serializes measured children) and returns the
/// measured repetitions in rep order. Wall-clock total_s spans spawn to
/// exit; stage times appear only when the runtime's probe supplied a
/// profile file for the run.
std::vector<RunRecord> run_case(const TestCase& tc, const RuntimeSpec& rt,
                                const ExecutionPlan& plan);

/// Runs the whole plan in the configured interleaving order.
std::vector<RunRecord> run_plan(const ExecutionPlan& plan,
                                std::ostream* progress = nullptr);

struct BuildResult {
  TimingMatrix total;
  std::map<Stage, TimingMatrix> stage_matrices;  // filled when every surviving
                                                 // record carries stage times
  std::vector<ExclusionRecord> exclusions;
};

/// Exclusions for every case with any non-ok or missing run.
std::vector<ExclusionRecord> collect_exclusions(const std::vector<RunRecord>& records,
                                                const ExecutionPlan& plan);

/// Averages surviving cells over repetitions into matrices. A pure function
/// of the record set: shuffled input yields an identical result. Throws
/// Error(empty_matrix) when every case is excluded.
BuildResult build_matrix(const std::vector<RunRecord>& records,
                         const ExecutionPlan& plan);

/// JSON Lines: one RunRecord per line.
void write_records_jsonl(const std::vector<RunRecord>& records, std::ostream& out);
std::vector<RunRecord> read_records_jsonl(std::istream& in);

}  // namespace warpdiff
