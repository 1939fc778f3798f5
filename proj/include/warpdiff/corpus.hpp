#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "warpdiff/executor.hpp"
#include "warpdiff/types.hpp"

namespace warpdiff {

/// External compiler invocation. `command_template` must contain `{src}` and
/// `{out}` exactly once each; the opt-level flag (`-O2` for "O2") and
/// extra_flags are appended after the substituted template tokens.
struct CompilerConfig {
  std::string command_template;
  std::vector<std::string> extra_flags;
  std::string opt_level = "O2";

  void validate() const;
  bool operator==(const CompilerConfig&) const = default;
};

/// Optional overrides for ExecutionPlan knobs. CLI flags beat these; these
/// beat the built-in defaults.
struct PlanDefaults {
  std::optional<int> repetitions;
  std::optional<double> timeout_s;
  std::optional<int> warmup_runs;
  std::optional<Interleaving> interleaving;

  bool operator==(const PlanDefaults&) const = default;
};

struct Manifest {
  std::string description;
  std::vector<RuntimeSpec> runtimes;
  std::vector<TestCase> cases;
  std::optional<CompilerConfig> compiler;
  PlanDefaults defaults;

  void validate() const;
  bool operator==(const Manifest&) const = default;
};

/// Loads and fully validates a manifest. Relative case paths resolve against
/// the manifest's directory. Wasm paths must exist or be producible (source
/// present and a compiler configured).
Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

ExecutionPlan plan_from_manifest(const Manifest& manifest);

/// Compiles one case. Returns the case with wasm_path set (to the manifest
/// path when given, else `<out_dir>/<id>.wasm`). Skips work when the output
/// is newer than the source unless `force` (`cache_hit` reports the skip).
/// Throws CompilerSpawnFailure when the compiler binary itself is missing
/// (fatal) and CompileFailure when the compiler rejects the source (per-case).
TestCase compile_case(const TestCase& tc, const CompilerConfig& cfg,
                      const std::filesystem::path& out_dir, bool force = false,
                      bool* cache_hit = nullptr);

struct CompilePhase {
  Manifest resolved;                      // compiled + precompiled cases only
  std::vector<ExclusionRecord> exclusions;
  std::size_t cache_hits = 0;
};

/// Runs compile_case over every case that carries a source; cases with only
/// a wasm_path pass through untouched. Compile failures become per-case
/// exclusions, mirroring how a partly broken corpus degrades gracefully.
CompilePhase compile_all(const Manifest& manifest, const std::filesystem::path& out_dir,
                         bool force = false);

}  // namespace warpdiff
