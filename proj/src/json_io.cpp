#include "warpdiff/json_io.hpp"

namespace warpdiff {

using nlohmann::json;

namespace {

[[noreturn]] void bad_enum(const char* what, const std::string& value) {
  raise(errc::parse_error, std::string("unknown ") + what + " '" + value + "'");
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) {
    out = j.at(key).get<T>();
  } else {
    out = std::nullopt;
  }
}

template <typename T>
void get_default(const json& j, const char* key, T& out, T fallback) {
  out = j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

ExecMode exec_mode_from_string(const std::string& s) {
  if (s == "aot") return ExecMode::aot;
  if (s == "interpreter") return ExecMode::interpreter;
  bad_enum("execution mode", s);
}

StageProbe stage_probe_from_string(const std::string& s) {
  if (s == "none") return StageProbe::none;
  if (s == "external_profile") return StageProbe::external_profile;
  bad_enum("stage probe", s);
}

Stage stage_from_string(const std::string& s) {
  if (s == "total") return Stage::total;
  if (s == "init") return Stage::init;
  if (s == "load") return Stage::load;
  if (s == "exec") return Stage::exec;
  bad_enum("stage", s);
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "ok") return RunStatus::ok;
  if (s == "wrong_output") return RunStatus::wrong_output;
  if (s == "runtime_error") return RunStatus::runtime_error;
  if (s == "timeout") return RunStatus::timeout;
  bad_enum("run status", s);
}

Interleaving interleaving_from_string(const std::string& s) {
  if (s == "by_case") return Interleaving::by_case;
  if (s == "by_runtime") return Interleaving::by_runtime;
  bad_enum("interleaving", s);
}

ExclusionReason exclusion_reason_from_string(const std::string& s) {
  if (s == "wrong_output") return ExclusionReason::wrong_output;
  if (s == "runtime_error") return ExclusionReason::runtime_error;
  if (s == "timeout") return ExclusionReason::timeout;
  if (s == "compile_failure") return ExclusionReason::compile_failure;
  bad_enum("exclusion reason", s);
}

void to_json(json& j, const RuntimeSpec& v) {
  j = json{{"id", v.id},
           {"display_name", v.display_name},
           {"command_template", v.command_template},
           {"mode", to_string(v.mode)},
           {"stage_probe", to_string(v.stage_probe)}};
}

void from_json(const json& j, RuntimeSpec& v) {
  v.id = j.at("id").get<std::string>();
  get_default<std::string>(j, "display_name", v.display_name, v.id);
  v.command_template = j.at("command_template").get<std::string>();
  std::string mode;
  get_default<std::string>(j, "mode", mode, "aot");
  v.mode = exec_mode_from_string(mode);
  std::string probe;
  get_default<std::string>(j, "stage_probe", probe, "none");
  v.stage_probe = stage_probe_from_string(probe);
}

void to_json(json& j, const TestCase& v) {
  j = json{{"id", v.id},
           {"args", v.args},
           {"expected_exit_code", v.expected_exit_code},
           {"tags", v.tags}};
  if (!v.source_path.empty()) j["source_path"] = v.source_path;
  if (!v.wasm_path.empty()) j["wasm_path"] = v.wasm_path;
  if (v.stdin_data) j["stdin"] = *v.stdin_data;
  if (v.expected_stdout_digest) j["expected_stdout_digest"] = *v.expected_stdout_digest;
}

void from_json(const json& j, TestCase& v) {
  v.id = j.at("id").get<std::string>();
  get_default<std::string>(j, "source_path", v.source_path, "");
  get_default<std::string>(j, "wasm_path", v.wasm_path, "");
  get_default<std::vector<std::string>>(j, "args", v.args, {});
  get_optional(j, "stdin", v.stdin_data);
  get_optional(j, "expected_stdout_digest", v.expected_stdout_digest);
  get_default<int>(j, "expected_exit_code", v.expected_exit_code, 0);
  get_default<std::vector<std::string>>(j, "tags", v.tags, {});
}

void to_json(json& j, const StageTiming& v) {
  j = json{{"init_s", v.init_s},
           {"load_s", v.load_s},
           {"exec_s", v.exec_s},
           {"total_s", v.total_s},
           {"stages_present", v.stages_present}};
}

void from_json(const json& j, StageTiming& v) {
  get_default<double>(j, "init_s", v.init_s, 0.0);
  get_default<double>(j, "load_s", v.load_s, 0.0);
  get_default<double>(j, "exec_s", v.exec_s, 0.0);
  v.total_s = j.at("total_s").get<double>();
  get_default<bool>(j, "stages_present", v.stages_present, false);
}

void to_json(json& j, const RunRecord& v) {
  j = json{{"case_id", v.case_id},
           {"runtime_id", v.runtime_id},
           {"rep_index", v.rep_index},
           {"timing", v.timing},
           {"exit_code", v.exit_code},
           {"stdout_digest", v.stdout_digest},
           {"status", to_string(v.status)},
           {"mono_start_s", v.mono_start_s},
           {"mono_end_s", v.mono_end_s}};
  if (v.cpu_s) j["cpu_s"] = *v.cpu_s;
  if (!v.failure_stdout.empty()) j["failure_stdout"] = v.failure_stdout;
  if (!v.failure_stderr.empty()) j["failure_stderr"] = v.failure_stderr;
}

void from_json(const json& j, RunRecord& v) {
  v.case_id = j.at("case_id").get<std::string>();
  v.runtime_id = j.at("runtime_id").get<std::string>();
  get_default<int>(j, "rep_index", v.rep_index, 0);
  v.timing = j.at("timing").get<StageTiming>();
  get_default<int>(j, "exit_code", v.exit_code, 0);
  get_default<std::string>(j, "stdout_digest", v.stdout_digest, "");
  v.status = run_status_from_string(j.at("status").get<std::string>());
  get_optional(j, "cpu_s", v.cpu_s);
  get_default<double>(j, "mono_start_s", v.mono_start_s, 0.0);
  get_default<double>(j, "mono_end_s", v.mono_end_s, 0.0);
  get_default<std::string>(j, "failure_stdout", v.failure_stdout, "");
  get_default<std::string>(j, "failure_stderr", v.failure_stderr, "");
}

void to_json(json& j, const TimingMatrix& v) {
  json rows = json::array();
  for (std::size_t i = 0; i < v.n_cases(); ++i) {
    rows.push_back(v.row(i));
  }
  j = json{{"stage", to_string(v.stage)},
           {"case_ids", v.case_ids},
           {"runtime_ids", v.runtime_ids},
           {"values", rows}};
}

void from_json(const json& j, TimingMatrix& v) {
  v.stage = stage_from_string(j.at("stage").get<std::string>());
  v.case_ids = j.at("case_ids").get<std::vector<std::string>>();
  v.runtime_ids = j.at("runtime_ids").get<std::vector<std::string>>();
  v.values.clear();
  for (const auto& row : j.at("values")) {
    auto vals = row.get<std::vector<double>>();
    v.values.insert(v.values.end(), vals.begin(), vals.end());
  }
}

void to_json(json& j, const OracleVector& v) {
  j = json{{"runtime_ids", v.runtime_ids},
           {"components", v.components},
           {"n_cases", v.n_cases}};
}

void from_json(const json& j, OracleVector& v) {
  v.runtime_ids = j.at("runtime_ids").get<std::vector<std::string>>();
  v.components = j.at("components").get<std::vector<double>>();
  v.n_cases = j.at("n_cases").get<std::size_t>();
}

void to_json(json& j, const CaseAnalysis& v) {
  j = json{{"case_id", v.case_id},
           {"raw_vector", v.raw_vector},
           {"unit_vector", v.unit_vector},
           {"distance", v.distance},
           {"deviation_degrees", v.deviation_degrees}};
  if (v.located_runtime) j["located_runtime"] = *v.located_runtime;
  if (v.located_degree) j["located_degree"] = *v.located_degree;
}

void from_json(const json& j, CaseAnalysis& v) {
  v.case_id = j.at("case_id").get<std::string>();
  v.raw_vector = j.at("raw_vector").get<std::vector<double>>();
  v.unit_vector = j.at("unit_vector").get<std::vector<double>>();
  v.distance = j.at("distance").get<double>();
  v.deviation_degrees = j.at("deviation_degrees").get<std::vector<double>>();
  get_optional(j, "located_runtime", v.located_runtime);
  get_optional(j, "located_degree", v.located_degree);
}

void to_json(json& j, const StageLocation& v) {
  json degrees = json::object();
  for (const auto& [stage, degree] : v.per_stage_degrees) {
    degrees[to_string(stage)] = degree;
  }
  j = json{{"case_id", v.case_id},
           {"runtime_id", v.runtime_id},
           {"stage", to_string(v.stage)},
           {"per_stage_degrees", degrees}};
}

void from_json(const json& j, StageLocation& v) {
  v.case_id = j.at("case_id").get<std::string>();
  v.runtime_id = j.at("runtime_id").get<std::string>();
  v.stage = stage_from_string(j.at("stage").get<std::string>());
  v.per_stage_degrees.clear();
  for (const auto& [key, value] : j.at("per_stage_degrees").items()) {
    v.per_stage_degrees[stage_from_string(key)] = value.get<double>();
  }
}

void to_json(json& j, const ExclusionRecord& v) {
  j = json{{"case_id", v.case_id},
           {"reason", to_string(v.reason)},
           {"detail", v.detail}};
  if (v.runtime_id) j["runtime_id"] = *v.runtime_id;
}

void from_json(const json& j, ExclusionRecord& v) {
  v.case_id = j.at("case_id").get<std::string>();
  v.reason = exclusion_reason_from_string(j.at("reason").get<std::string>());
  get_optional(j, "runtime_id", v.runtime_id);
  get_default<std::string>(j, "detail", v.detail, "");
}

void to_json(json& j, const CompilerConfig& v) {
  j = json{{"command_template", v.command_template},
           {"extra_flags", v.extra_flags},
           {"opt_level", v.opt_level}};
}

void from_json(const json& j, CompilerConfig& v) {
  v.command_template = j.at("command_template").get<std::string>();
  get_default<std::vector<std::string>>(j, "extra_flags", v.extra_flags, {});
  get_default<std::string>(j, "opt_level", v.opt_level, "O2");
}

void to_json(json& j, const PlanDefaults& v) {
  j = json::object();
  if (v.repetitions) j["repetitions"] = *v.repetitions;
  if (v.timeout_s) j["timeout_s"] = *v.timeout_s;
  if (v.warmup_runs) j["warmup_runs"] = *v.warmup_runs;
  if (v.interleaving) j["interleaving"] = to_string(*v.interleaving);
}

void from_json(const json& j, PlanDefaults& v) {
  get_optional(j, "repetitions", v.repetitions);
  get_optional(j, "timeout_s", v.timeout_s);
  get_optional(j, "warmup_runs", v.warmup_runs);
  v.interleaving = std::nullopt;
  if (j.contains("interleaving") && !j.at("interleaving").is_null()) {
    v.interleaving = interleaving_from_string(j.at("interleaving").get<std::string>());
  }
}

void to_json(json& j, const Manifest& v) {
  j = json{{"runtimes", v.runtimes}, {"cases", v.cases}};
  if (!v.description.empty()) j["description"] = v.description;
  if (v.compiler) j["compiler"] = *v.compiler;
  json defaults;
  to_json(defaults, v.defaults);
  if (!defaults.empty()) j["defaults"] = defaults;
}

void from_json(const json& j, Manifest& v) {
  get_default<std::string>(j, "description", v.description, "");
  v.runtimes = j.at("runtimes").get<std::vector<RuntimeSpec>>();
  v.cases = j.at("cases").get<std::vector<TestCase>>();
  v.compiler = std::nullopt;
  if (j.contains("compiler") && !j.at("compiler").is_null()) {
    v.compiler = j.at("compiler").get<CompilerConfig>();
  }
  v.defaults = PlanDefaults{};
  if (j.contains("defaults")) {
    from_json(j.at("defaults"), v.defaults);
  }
}

void to_json(json& j, const Report& v) {
  j = json{{"generated_at_unix", v.generated_at_unix},
           {"config_digest", v.config_digest},
           {"oracle", v.oracle},
           {"top_cases", v.top_cases},
           {"exclusions", v.exclusions}};
  if (!v.stage_locations.empty()) j["stage_locations"] = v.stage_locations;
}

void from_json(const json& j, Report& v) {
  v.generated_at_unix = j.at("generated_at_unix").get<std::int64_t>();
  get_default<std::string>(j, "config_digest", v.config_digest, "");
  v.oracle = j.at("oracle").get<OracleVector>();
  v.top_cases = j.at("top_cases").get<std::vector<CaseAnalysis>>();
  get_default<std::vector<ExclusionRecord>>(j, "exclusions", v.exclusions, {});
  get_default<std::vector<StageLocation>>(j, "stage_locations", v.stage_locations, {});
}

}  // namespace warpdiff
