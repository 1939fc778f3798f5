#include "warpdiff/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "warpdiff/json_io.hpp"
#include "warpdiff/process.hpp"

namespace fs = std::filesystem;

namespace warpdiff {

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

void resolve_path(std::string& path, const fs::path& base) {
  if (path.empty()) return;
  fs::path p(path);
  if (p.is_relative()) path = (base / p).lexically_normal().string();
}

}  // namespace

void CompilerConfig::validate() const {
  for (const char* placeholder : {"{src}", "{out}"}) {
    std::size_t found = count_occurrences(command_template, placeholder);
    if (found != 1) {
      raise(errc::validation_error,
            std::string("compiler.command_template must contain ") + placeholder +
                " exactly once (found " + std::to_string(found) + ")");
    }
  }
}

void Manifest::validate() const {
  if (runtimes.empty()) {
    raise(errc::validation_error, "runtimes: at least one runtime setting is required");
  }
  std::set<std::string> runtime_ids;
  for (std::size_t i = 0; i < runtimes.size(); ++i) {
    try {
      runtimes[i].validate();
    } catch (const Error& e) {
      raise(e.code(), "runtimes[" + std::to_string(i) + "]: " + e.what());
    }
    if (!runtime_ids.insert(runtimes[i].id).second) {
      raise(errc::validation_error,
            "runtimes[" + std::to_string(i) + "]: duplicate runtime id '" +
                runtimes[i].id + "'");
    }
  }

  if (cases.empty()) {
    raise(errc::validation_error, "cases: at least one test case is required");
  }
  std::set<std::string> case_ids;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string where = "cases[" + std::to_string(i) + "]";
    try {
      cases[i].validate();
    } catch (const Error& e) {
      raise(e.code(), where + ": " + e.what());
    }
    if (!case_ids.insert(cases[i].id).second) {
      raise(errc::validation_error, where + ": duplicate case id '" + cases[i].id + "'");
    }
  }

  if (compiler) compiler->validate();

  // Every case must be runnable now or producible by the compile phase.
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const TestCase& tc = cases[i];
    const std::string where = "cases[" + std::to_string(i) + "] ('" + tc.id + "')";
    bool wasm_ready = !tc.wasm_path.empty() && fs::exists(tc.wasm_path);
    bool producible =
        compiler.has_value() && !tc.source_path.empty() && fs::exists(tc.source_path);
    if (!wasm_ready && !producible) {
      if (!tc.source_path.empty() && !fs::exists(tc.source_path)) {
        raise(errc::validation_error, where + ": source_path '" + tc.source_path +
                                          "' does not exist");
      }
      if (!tc.wasm_path.empty()) {
        raise(errc::validation_error,
              where + ": wasm_path '" + tc.wasm_path +
                  "' does not exist and no compiler/source can produce it");
      }
      raise(errc::validation_error,
            where + ": source_path is set but no compiler is configured");
    }
  }

  if (defaults.repetitions && *defaults.repetitions < 1) {
    raise(errc::validation_error, "defaults.repetitions must be >= 1");
  }
  if (defaults.timeout_s && !(*defaults.timeout_s > 0.0)) {
    raise(errc::validation_error, "defaults.timeout_s must be > 0");
  }
  if (defaults.warmup_runs && *defaults.warmup_runs < 0) {
    raise(errc::validation_error, "defaults.warmup_runs must be >= 0");
  }
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(errc::io_error, "cannot open manifest '" + path.string() + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    raise(errc::parse_error, "manifest '" + path.string() + "' is not valid JSON");
  }

  Manifest manifest;
  try {
    manifest = j.get<Manifest>();
  } catch (const nlohmann::json::exception& e) {
    raise(errc::parse_error, "manifest '" + path.string() + "': " + e.what());
  }

  fs::path base = fs::absolute(path).parent_path();
  for (TestCase& tc : manifest.cases) {
    resolve_path(tc.source_path, base);
    resolve_path(tc.wasm_path, base);
  }
  manifest.validate();
  return manifest;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  nlohmann::json j = manifest;
  std::ofstream out(path);
  if (!out) {
    raise(errc::io_error, "cannot write manifest '" + path.string() + "'");
  }
  out << j.dump(2) << '\n';
}

ExecutionPlan plan_from_manifest(const Manifest& manifest) {
  ExecutionPlan plan;
  plan.runtimes = manifest.runtimes;
  plan.cases = manifest.cases;
  if (manifest.defaults.repetitions) plan.repetitions = *manifest.defaults.repetitions;
  if (manifest.defaults.timeout_s) plan.timeout_s = *manifest.defaults.timeout_s;
  if (manifest.defaults.warmup_runs) plan.warmup_runs = *manifest.defaults.warmup_runs;
  if (manifest.defaults.interleaving) plan.interleaving = *manifest.defaults.interleaving;
  return plan;
}

namespace {

std::string sanitized_stem(const std::string& id) {
  std::string stem = id;
  for (char& c : stem) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return stem;
}

}  // namespace

TestCase compile_case(const TestCase& tc, const CompilerConfig& cfg,
                      const fs::path& out_dir, bool force, bool* cache_hit) {
  if (cache_hit) *cache_hit = false;
  cfg.validate();
  if (tc.source_path.empty()) {
    raise(errc::validation_error, "case '" + tc.id + "' has no source_path to compile");
  }
  if (!fs::exists(tc.source_path)) {
    raise(errc::validation_error,
          "case '" + tc.id + "': source '" + tc.source_path + "' does not exist");
  }

  // Absolute output path: the resolved manifest must stay loadable from any
  // directory.
  fs::path out_path = tc.wasm_path.empty()
                          ? out_dir / (sanitized_stem(tc.id) + ".wasm")
                          : fs::path(tc.wasm_path);
  out_path = fs::absolute(out_path).lexically_normal();
  if (out_path.has_parent_path()) {
    fs::create_directories(out_path.parent_path());
  }

  TestCase updated = tc;
  updated.wasm_path = out_path.string();

  if (!force && fs::exists(out_path) &&
      fs::last_write_time(out_path) >= fs::last_write_time(tc.source_path)) {
    if (cache_hit) *cache_hit = true;
    return updated;
  }

  std::string command = replace_all(cfg.command_template, "{src}", tc.source_path);
  command = replace_all(command, "{out}", out_path.string());
  ProcessRequest request;
  request.argv = split_command(command);
  if (!cfg.opt_level.empty()) {
    request.argv.push_back("-" + cfg.opt_level);
  }
  request.argv.insert(request.argv.end(), cfg.extra_flags.begin(), cfg.extra_flags.end());
  request.timeout_s = 600.0;

  ProcessResult pr;
  try {
    pr = run_process(request);
  } catch (const Error& e) {
    if (e.code() == errc::spawn_failure) {
      raise(errc::compiler_spawn_failure, e.what());
    }
    throw;
  }

  if (pr.timed_out || pr.exit_code != 0) {
    raise(errc::compile_failure,
          "case '" + tc.id + "': compiler exited with code " +
              std::to_string(pr.exit_code) + (pr.timed_out ? " (timed out)" : "") +
              "; stderr: " + pr.stderr_data.substr(0, 2000));
  }
  if (!fs::exists(out_path)) {
    raise(errc::compile_failure,
          "case '" + tc.id + "': compiler exited 0 but produced no output at '" +
              out_path.string() + "'");
  }
  return updated;
}

CompilePhase compile_all(const Manifest& manifest, const fs::path& out_dir, bool force) {
  if (!out_dir.empty()) fs::create_directories(out_dir);

  CompilePhase phase;
  phase.resolved = manifest;
  phase.resolved.cases.clear();

  for (const TestCase& tc : manifest.cases) {
    if (tc.source_path.empty()) {
      phase.resolved.cases.push_back(tc);  // precompiled, nothing to do
      continue;
    }
    if (!manifest.compiler) {
      if (!tc.wasm_path.empty() && fs::exists(tc.wasm_path)) {
        phase.resolved.cases.push_back(tc);
      } else {
        phase.exclusions.push_back(
            {tc.id, ExclusionReason::compile_failure, std::nullopt,
             "case has only a source_path and the manifest configures no compiler"});
      }
      continue;
    }
    try {
      bool cache_hit = false;
      phase.resolved.cases.push_back(
          compile_case(tc, *manifest.compiler, out_dir, force, &cache_hit));
      if (cache_hit) ++phase.cache_hits;
    } catch (const Error& e) {
      if (e.code() != errc::compile_failure) throw;
      phase.exclusions.push_back(
          {tc.id, ExclusionReason::compile_failure, std::nullopt, e.what()});
    }
  }
  return phase;
}

}  // namespace warpdiff
