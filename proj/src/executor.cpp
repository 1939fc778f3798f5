#include "warpdiff/executor.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "warpdiff/json_io.hpp"
#include "warpdiff/process.hpp"
#include "warpdiff/sha256.hpp"

namespace fs = std::filesystem;

namespace warpdiff {

const char* to_string(Interleaving i) noexcept {
  return i == Interleaving::by_case ? "by_case" : "by_runtime";
}

const char* to_string(ExclusionReason r) noexcept {
  switch (r) {
    case ExclusionReason::wrong_output: return "wrong_output";
    case ExclusionReason::runtime_error: return "runtime_error";
    case ExclusionReason::timeout: return "timeout";
    case ExclusionReason::compile_failure: return "compile_failure";
  }
  return "runtime_error";
}

void ExecutionPlan::validate() const {
  if (repetitions < 1) {
    raise(errc::validation_error, "repetitions must be >= 1");
  }
  if (!(timeout_s > 0.0)) {
    raise(errc::validation_error, "timeout_s must be > 0");
  }
  if (warmup_runs < 0) {
    raise(errc::validation_error, "warmup_runs must be >= 0");
  }
}

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// One measured child at a time, harness-wide, so runs never contend.
std::mutex g_single_run_lock;

constexpr std::size_t kFailureCaptureBytes = 4096;

struct ProfileMarks {
  double init_end_s = 0.0;
  double load_end_s = 0.0;
};

ProfileMarks parse_profile_file(const fs::path& path, double total_s) {
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("marks") || !j.at("marks").is_array()) {
    raise(errc::probe_parse_failure,
          "profile file " + path.string() + " is not a JSON object with a 'marks' array");
  }
  ProfileMarks marks;
  bool have_init = false, have_load = false;
  for (const auto& mark : j.at("marks")) {
    if (!mark.contains("label") || !mark.contains("t_s")) {
      raise(errc::probe_parse_failure, "profile mark missing 'label' or 't_s'");
    }
    std::string label = mark.at("label").get<std::string>();
    double t = mark.at("t_s").get<double>();
    if (label == "init_end") {
      marks.init_end_s = t;
      have_init = true;
    } else if (label == "load_end") {
      marks.load_end_s = t;
      have_load = true;
    } else {
      raise(errc::probe_parse_failure, "unknown profile mark label '" + label + "'");
    }
  }
  if (!have_init || !have_load) {
    raise(errc::probe_parse_failure, "profile file must mark both init_end and load_end");
  }
  if (!(marks.init_end_s >= 0.0) || marks.load_end_s < marks.init_end_s ||
      marks.load_end_s > total_s) {
    raise(errc::probe_parse_failure,
          "profile marks out of order: need 0 <= init_end <= load_end <= total");
  }
  return marks;
}

RunStatus classify(const ProcessResult& pr, const TestCase& tc, const std::string& digest) {
  if (pr.timed_out) return RunStatus::timeout;
  if (pr.signaled || pr.exit_code != tc.expected_exit_code) return RunStatus::runtime_error;
  if (tc.expected_stdout_digest && *tc.expected_stdout_digest != digest) {
    return RunStatus::wrong_output;
  }
  return RunStatus::ok;
}

fs::path fresh_profile_path() {
  static std::atomic<unsigned long> counter{0};
  return fs::temp_directory_path() /
         ("warpdiff_profile_" + std::to_string(::getpid()) + "_" +
          std::to_string(counter.fetch_add(1)) + ".json");
}

}  // namespace

std::vector<std::string> build_argv(const RuntimeSpec& rt, const TestCase& tc) {
  rt.validate();
  std::string command = replace_all(rt.command_template, "{wasm}", tc.wasm_path);
  command = replace_all(command, "{args}", join(tc.args, " "));
  std::vector<std::string> argv = split_command(command);
  if (argv.empty()) {
    raise(errc::validation_error, "runtime '" + rt.id + "': command expands to nothing");
  }
  return argv;
}

std::vector<RunRecord> run_case(const TestCase& tc, const RuntimeSpec& rt,
                                const ExecutionPlan& plan) {
  plan.validate();
  if (!fs::exists(tc.wasm_path)) {
    raise(errc::validation_error,
          "case '" + tc.id + "': wasm module not found at '" + tc.wasm_path + "'");
  }

  ProcessRequest request;
  request.argv = build_argv(rt, tc);
  request.stdin_data = tc.stdin_data;
  request.timeout_s = plan.timeout_s;

  std::vector<RunRecord> records;
  records.reserve(std::size_t(plan.repetitions));
  const int total_runs = plan.warmup_runs + plan.repetitions;

  for (int run = 0; run < total_runs; ++run) {
    const bool warmup = run < plan.warmup_runs;

    fs::path profile_path;
    if (rt.stage_probe == StageProbe::external_profile) {
      profile_path = fresh_profile_path();
      std::error_code ec;
      fs::remove(profile_path, ec);
      request.extra_env[kProfileFileEnv] = profile_path.string();
    }

    Sha256 hasher;
    request.stdout_sink = [&hasher](const char* data, std::size_t len) {
      hasher.update(data, len);
    };

    ProcessResult pr;
    {
      std::lock_guard<std::mutex> one_at_a_time(g_single_run_lock);
      pr = run_process(request);
    }

    if (warmup) {
      if (!profile_path.empty()) {
        std::error_code ec;
        fs::remove(profile_path, ec);
      }
      continue;
    }

    RunRecord record;
    record.case_id = tc.id;
    record.runtime_id = rt.id;
    record.rep_index = run - plan.warmup_runs;
    record.exit_code = pr.exit_code;
    record.stdout_digest = hasher.hex_digest();
    record.status = classify(pr, tc, record.stdout_digest);
    record.cpu_s = pr.cpu_s;
    record.mono_start_s = pr.mono_start_s;
    record.mono_end_s = pr.mono_end_s;
    record.timing.total_s = pr.wall_s;
    record.timing.stages_present = false;

    if (!profile_path.empty()) {
      if (fs::exists(profile_path)) {
        ProfileMarks marks = parse_profile_file(profile_path, pr.wall_s);
        record.timing.init_s = marks.init_end_s;
        record.timing.load_s = marks.load_end_s - marks.init_end_s;
        record.timing.exec_s = pr.wall_s - marks.load_end_s;
        record.timing.stages_present = true;
        std::error_code ec;
        fs::remove(profile_path, ec);
      }
    }

    if (record.status != RunStatus::ok) {
      record.failure_stdout = pr.stdout_data.substr(0, kFailureCaptureBytes);
      record.failure_stderr = pr.stderr_data.substr(0, kFailureCaptureBytes);
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<RunRecord> run_plan(const ExecutionPlan& plan, std::ostream* progress) {
  plan.validate();
  std::vector<RunRecord> all;
  all.reserve(plan.cases.size() * plan.runtimes.size() * std::size_t(plan.repetitions));

  auto run_pair = [&](const TestCase& tc, const RuntimeSpec& rt) {
    if (progress) {
      *progress << "running " << tc.id << " under " << rt.id << "\n" << std::flush;
    }
    std::vector<RunRecord> records = run_case(tc, rt, plan);
    all.insert(all.end(), std::make_move_iterator(records.begin()),
               std::make_move_iterator(records.end()));
  };

  if (plan.interleaving == Interleaving::by_case) {
    for (const TestCase& tc : plan.cases) {
      for (const RuntimeSpec& rt : plan.runtimes) run_pair(tc, rt);
    }
  } else {
    for (const RuntimeSpec& rt : plan.runtimes) {
      for (const TestCase& tc : plan.cases) run_pair(tc, rt);
    }
  }
  return all;
}

namespace {

ExclusionReason reason_from_status(RunStatus status) {
  switch (status) {
    case RunStatus::wrong_output: return ExclusionReason::wrong_output;
    case RunStatus::timeout: return ExclusionReason::timeout;
    default: return ExclusionReason::runtime_error;
  }
}

using CellKey = std::pair<std::string, std::string>;  // (case_id, runtime_id)

std::map<CellKey, std::vector<const RunRecord*>> group_records(
    const std::vector<RunRecord>& records) {
  std::map<CellKey, std::vector<const RunRecord*>> grouped;
  for (const RunRecord& r : records) {
    grouped[{r.case_id, r.runtime_id}].push_back(&r);
  }
  for (auto& [key, cell] : grouped) {
    std::sort(cell.begin(), cell.end(), [](const RunRecord* a, const RunRecord* b) {
      return a->rep_index < b->rep_index;
    });
  }
  return grouped;
}

}  // namespace

std::vector<ExclusionRecord> collect_exclusions(const std::vector<RunRecord>& records,
                                                const ExecutionPlan& plan) {
  auto grouped = group_records(records);

  std::vector<std::string> case_ids, runtime_ids;
  for (const auto& tc : plan.cases) case_ids.push_back(tc.id);
  for (const auto& rt : plan.runtimes) runtime_ids.push_back(rt.id);
  std::sort(case_ids.begin(), case_ids.end());
  std::sort(runtime_ids.begin(), runtime_ids.end());

  std::vector<ExclusionRecord> exclusions;
  for (const std::string& case_id : case_ids) {
    std::optional<ExclusionRecord> exclusion;
    for (const std::string& runtime_id : runtime_ids) {
      auto it = grouped.find({case_id, runtime_id});
      const std::size_t have = it == grouped.end() ? 0 : it->second.size();
      if (have != std::size_t(plan.repetitions)) {
        exclusion = ExclusionRecord{
            case_id, ExclusionReason::runtime_error, runtime_id,
            "expected " + std::to_string(plan.repetitions) + " records, got " +
                std::to_string(have)};
        break;
      }
      for (const RunRecord* r : it->second) {
        if (r->status != RunStatus::ok) {
          std::string detail = std::string(to_string(r->status)) + " at rep " +
                               std::to_string(r->rep_index) + " (exit code " +
                               std::to_string(r->exit_code) + ")";
          if (!r->failure_stderr.empty()) {
            detail += "; stderr: " + r->failure_stderr.substr(0, 200);
          }
          exclusion = ExclusionRecord{case_id, reason_from_status(r->status),
                                      runtime_id, detail};
          break;
        }
      }
      if (exclusion) break;
    }
    if (exclusion) exclusions.push_back(std::move(*exclusion));
  }
  return exclusions;
}

BuildResult build_matrix(const std::vector<RunRecord>& records,
                         const ExecutionPlan& plan) {
  plan.validate();
  auto grouped = group_records(records);

  BuildResult result;
  result.exclusions = collect_exclusions(records, plan);

  std::set<std::string> excluded;
  for (const auto& e : result.exclusions) excluded.insert(e.case_id);

  std::vector<std::string> case_ids, runtime_ids;
  for (const auto& tc : plan.cases) {
    if (!excluded.count(tc.id)) case_ids.push_back(tc.id);
  }
  for (const auto& rt : plan.runtimes) runtime_ids.push_back(rt.id);
  std::sort(case_ids.begin(), case_ids.end());
  std::sort(runtime_ids.begin(), runtime_ids.end());

  if (case_ids.empty()) {
    raise(errc::empty_matrix,
          "all " + std::to_string(plan.cases.size()) + " cases were excluded");
  }

  const std::size_t n = case_ids.size();
  const std::size_t k = runtime_ids.size();

  bool all_stages_present = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      for (const RunRecord* r : grouped.at({case_ids[i], runtime_ids[j]})) {
        all_stages_present = all_stages_present && r->timing.stages_present;
      }
    }
  }

  auto build = [&](Stage stage, auto field) {
    TimingMatrix m;
    m.stage = stage;
    m.case_ids = case_ids;
    m.runtime_ids = runtime_ids;
    m.values.resize(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const auto& cell = grouped.at({case_ids[i], runtime_ids[j]});
        double sum = 0.0;
        for (const RunRecord* r : cell) sum += field(r->timing);
        m.values[i * k + j] = sum / double(cell.size());
      }
    }
    return m;
  };

  result.total = validate_matrix(build(Stage::total, [](const StageTiming& t) {
    return t.total_s;
  }));
  if (all_stages_present) {
    result.stage_matrices.emplace(
        Stage::init,
        validate_matrix(build(Stage::init, [](const StageTiming& t) { return t.init_s; })));
    result.stage_matrices.emplace(
        Stage::load,
        validate_matrix(build(Stage::load, [](const StageTiming& t) { return t.load_s; })));
    result.stage_matrices.emplace(
        Stage::exec,
        validate_matrix(build(Stage::exec, [](const StageTiming& t) { return t.exec_s; })));
  }
  return result;
}

void write_records_jsonl(const std::vector<RunRecord>& records, std::ostream& out) {
  for (const RunRecord& r : records) {
    nlohmann::json j = r;
    out << j.dump() << '\n';
  }
}

std::vector<RunRecord> read_records_jsonl(std::istream& in) {
  std::vector<RunRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      raise(errc::parse_error, "records line " + std::to_string(line_no) + ": invalid JSON");
    }
    records.push_back(j.get<RunRecord>());
  }
  return records;
}

}  // namespace warpdiff
