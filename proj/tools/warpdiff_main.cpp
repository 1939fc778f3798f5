// warpdiff: differential performance testing for standalone Wasm runtimes.
//
// Subcommands are file-to-file transforms over the documented formats
// (manifest JSON, timing-matrix CSV, records JSONL, report JSON), so they
// compose in pipelines:
//
//   warpdiff simulate --seed 7 | warpdiff analyze | warpdiff report --top 10

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "warpdiff/analysis.hpp"
#include "warpdiff/corpus.hpp"
#include "warpdiff/csv.hpp"
#include "warpdiff/executor.hpp"
#include "warpdiff/json_io.hpp"
#include "warpdiff/process.hpp"
#include "warpdiff/report.hpp"
#include "warpdiff/sha256.hpp"
#include "warpdiff/simulator.hpp"

namespace fs = std::filesystem;
using namespace warpdiff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDegraded = 1;  // measured, but some cases were excluded
constexpr int kExitFatal = 2;

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::io_error, "cannot write '" + path + "'");
  out << content;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::io_error, "cannot write '" + path.string() + "'");
  out << content;
}

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("WARPDIFF_OUT"); env && *env) return env;
  return ".";
}

ReportFormat format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "md") return ReportFormat::md;
  if (s == "txt") return ReportFormat::txt;
  raise(errc::validation_error, "unknown format '" + s + "' (expected json|md|txt)");
}

std::vector<ExclusionRecord> read_exclusions_file(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(read_input(path), nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    raise(errc::parse_error, "exclusions file '" + path + "' must be a JSON array");
  }
  return j.get<std::vector<ExclusionRecord>>();
}

// ---------------------------------------------------------------- compile --

struct CompileArgs {
  std::string manifest_path;
  std::string out_dir;
  bool recompile = false;
};

int cmd_compile(const CompileArgs& args) {
  Manifest manifest = load_manifest(args.manifest_path);
  fs::path out_dir = resolve_out_dir(args.out_dir);
  CompilePhase phase = compile_all(manifest, out_dir, args.recompile);

  write_manifest(phase.resolved, out_dir / "manifest.json");
  nlohmann::json ex = phase.exclusions;
  write_file(out_dir / "compile_exclusions.json", ex.dump(2) + "\n");

  std::cerr << "compiled " << phase.resolved.cases.size() << " cases ("
            << phase.cache_hits << " cached), excluded " << phase.exclusions.size()
            << "; wrote " << (out_dir / "manifest.json").string() << "\n";
  return phase.exclusions.empty() ? kExitOk : kExitDegraded;
}

// ---------------------------------------------------------------- measure --

struct MeasureArgs {
  std::string manifest_path;
  std::string out_dir;
  int reps = -1;
  int warmup = -1;
  double timeout_s = -1.0;
  std::string interleaving;
};

int cmd_measure(const MeasureArgs& args) {
  Manifest manifest = load_manifest(args.manifest_path);
  ExecutionPlan plan = plan_from_manifest(manifest);
  if (args.reps >= 0) plan.repetitions = args.reps;
  if (args.warmup >= 0) plan.warmup_runs = args.warmup;
  if (args.timeout_s >= 0) plan.timeout_s = args.timeout_s;
  if (!args.interleaving.empty()) {
    plan.interleaving = interleaving_from_string(args.interleaving);
  }
  plan.validate();

  for (const TestCase& tc : plan.cases) {
    if (!fs::exists(tc.wasm_path)) {
      raise(errc::validation_error,
            "case '" + tc.id + "': wasm module '" + tc.wasm_path +
                "' not found (run the compile step first)");
    }
  }

  fs::path out_dir = resolve_out_dir(args.out_dir);
  fs::create_directories(out_dir);

  std::vector<RunRecord> records = run_plan(plan, &std::cerr);
  {
    std::ofstream out(out_dir / "records.jsonl", std::ios::binary);
    write_records_jsonl(records, out);
  }

  std::vector<ExclusionRecord> exclusions;
  try {
    BuildResult built = build_matrix(records, plan);
    exclusions = built.exclusions;

    std::ostringstream csv;
    write_matrix_csv(built.total, csv);
    write_file(out_dir / "matrix.csv", csv.str());
    for (const auto& [stage, matrix] : built.stage_matrices) {
      std::ostringstream stage_csv;
      write_matrix_csv(matrix, stage_csv);
      write_file(out_dir / ("matrix_" + std::string(to_string(stage)) + ".csv"),
                 stage_csv.str());
    }
  } catch (const Error& e) {
    if (e.code() != errc::empty_matrix) throw;
    nlohmann::json ex = collect_exclusions(records, plan);
    write_file(out_dir / "exclusions.json", ex.dump(2) + "\n");
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return kExitFatal;
  }

  nlohmann::json ex = exclusions;
  write_file(out_dir / "exclusions.json", ex.dump(2) + "\n");

  std::cerr << "measured " << plan.cases.size() << " cases x " << plan.runtimes.size()
            << " runtimes x " << plan.repetitions << " reps; excluded "
            << exclusions.size() << "; wrote " << (out_dir / "matrix.csv").string()
            << "\n";
  return exclusions.empty() ? kExitOk : kExitDegraded;
}

// ---------------------------------------------------------------- analyze --

struct AnalyzeArgs {
  std::string in_path = "-";
  std::string out_path = "-";
  std::string exclusions_path;
  std::string manifest_path;
  std::string stage_init, stage_load, stage_exec;
  int stage_top = 10;
};

int cmd_analyze(const AnalyzeArgs& args) {
  std::string csv_text = read_input(args.in_path);
  TimingMatrix matrix = matrix_from_csv(csv_text);

  AnalyzeOptions options;
  options.config_digest = args.manifest_path.empty()
                              ? sha256_hex(csv_text)
                              : sha256_hex(read_input(args.manifest_path));
  if (!args.exclusions_path.empty()) {
    options.exclusions = read_exclusions_file(args.exclusions_path);
  }

  int stage_flags = int(!args.stage_init.empty()) + int(!args.stage_load.empty()) +
                    int(!args.stage_exec.empty());
  if (stage_flags != 0 && stage_flags != 3) {
    raise(errc::validation_error,
          "stage analysis needs all of --stage-init, --stage-load, --stage-exec");
  }
  if (stage_flags == 3) {
    options.stage_matrices.emplace(
        Stage::init, matrix_from_csv(read_input(args.stage_init), Stage::init));
    options.stage_matrices.emplace(
        Stage::load, matrix_from_csv(read_input(args.stage_load), Stage::load));
    options.stage_matrices.emplace(
        Stage::exec, matrix_from_csv(read_input(args.stage_exec), Stage::exec));
    options.stage_top_n = args.stage_top;
  }

  Report report = analyze_to_report(matrix, options);
  write_output(args.out_path, render_table(report, 1, ReportFormat::json));
  return kExitOk;
}

// ----------------------------------------------------------------- report --

struct ReportArgs {
  std::string in_path = "-";
  std::string out_path = "-";
  std::string format = "txt";
  int top = 10;
};

int cmd_report(const ReportArgs& args) {
  nlohmann::json j = nlohmann::json::parse(read_input(args.in_path), nullptr, false);
  if (j.is_discarded()) {
    raise(errc::parse_error, "report input is not valid JSON");
  }
  Report report = j.get<Report>();
  write_output(args.out_path, render_table(report, args.top, format_from_string(args.format)));
  return kExitOk;
}

// --------------------------------------------------------------- simulate --

struct SimulateArgs {
  std::uint64_t seed = 1;
  std::size_t cases = 120;
  std::size_t runtimes = 7;
  double noise = 0.05;
  std::string inject;  // "case_index:runtime_index:factor"
  std::string out_path = "-";
  std::string stages_out;
};

InjectedAnomaly parse_injection(const std::string& text) {
  InjectedAnomaly anomaly;
  char colon1 = 0, colon2 = 0;
  std::istringstream ss(text);
  if (!(ss >> anomaly.case_index >> colon1 >> anomaly.runtime_index >> colon2 >>
        anomaly.factor) ||
      colon1 != ':' || colon2 != ':' || !ss.eof()) {
    raise(errc::validation_error,
          "--inject expects <case_index>:<runtime_index>:<factor>, got '" + text + "'");
  }
  return anomaly;
}

int cmd_simulate(const SimulateArgs& args) {
  SimProfile profile = default_profile(args.seed, args.cases, args.runtimes, args.noise);
  TimingMatrix matrix = generate(profile);
  if (!args.inject.empty()) {
    matrix = inject(std::move(matrix), parse_injection(args.inject));
  }
  write_output(args.out_path, matrix_to_csv(matrix));

  if (!args.stages_out.empty()) {
    // Fixed per-runtime stage fractions derived from the seed, so simulated
    // stage data flows through the same files as measured stage data.
    std::vector<std::array<double, 3>> fractions;
    for (std::size_t j = 0; j < args.runtimes; ++j) {
      std::uint64_t state = args.seed ^ (0xA24BAED4963EE407ULL * (j + 1));
      double init = 0.05 + 0.15 * simrng::to_unit(simrng::next(state));
      double load = 0.10 + 0.30 * simrng::to_unit(simrng::next(state));
      fractions.push_back({init, load, 1.0 - init - load});
    }
    fs::path dir(args.stages_out);
    fs::create_directories(dir);
    for (const auto& [stage, part] : split_stages(matrix, fractions)) {
      write_file(dir / ("matrix_" + std::string(to_string(stage)) + ".csv"),
                 matrix_to_csv(part));
    }
  }
  return kExitOk;
}

// --------------------------------------------------------- bench-overhead --

struct BenchArgs {
  std::string in_path;
  std::size_t cases = 123;
  std::size_t runtimes = 7;
  std::uint64_t seed = 1;
  int repeat = 10;
  int top = 10;
  double budget_s = -1.0;
  std::string format = "txt";
};

int cmd_bench_overhead(const BenchArgs& args) {
  TimingMatrix matrix;
  if (!args.in_path.empty()) {
    matrix = matrix_from_csv(read_input(args.in_path));
  } else {
    matrix = generate(default_profile(args.seed, args.cases, args.runtimes, 0.05));
  }

  // Timed region: the full differential-testing step on an already measured
  // matrix (validation, oracle, ranking, degrees, report assembly, render).
  double total_s = 0.0, max_s = 0.0;
  std::size_t rendered_bytes = 0;
  for (int i = 0; i < args.repeat; ++i) {
    double t0 = monotonic_now_s();
    AnalyzeOptions options;
    options.config_digest = "bench";
    options.generated_at_unix = 1;
    Report report = analyze_to_report(matrix, options);
    rendered_bytes += render_table(report, args.top, ReportFormat::txt).size();
    double elapsed = monotonic_now_s() - t0;
    total_s += elapsed;
    max_s = std::max(max_s, elapsed);
  }
  if (rendered_bytes == 0) {
    raise(errc::validation_error, "render produced no output");
  }
  double mean_s = total_s / double(args.repeat);

  char line[160];
  std::snprintf(line, sizeof(line),
                "analysis overhead: cases=%zu runtimes=%zu runs=%d mean_s=%.6f max_s=%.6f\n",
                matrix.n_cases(), matrix.n_runtimes(), args.repeat, mean_s, max_s);
  if (args.format == "json") {
    nlohmann::json j{{"cases", matrix.n_cases()},
                     {"runtimes", matrix.n_runtimes()},
                     {"runs", args.repeat},
                     {"mean_s", mean_s},
                     {"max_s", max_s}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << line;
  }

  if (args.budget_s > 0.0 && mean_s > args.budget_s) {
    std::cerr << "error: mean analysis time " << mean_s << "s exceeds budget "
              << args.budget_s << "s\n";
    return kExitDegraded;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential performance testing for standalone Wasm runtimes"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* compile = app.add_subcommand("compile", "Compile manifest sources to Wasm modules");
  compile->add_option("--manifest", compile_args.manifest_path, "Manifest JSON path")
      ->required();
  compile->add_option("--out", compile_args.out_dir,
                      "Output directory (default $WARPDIFF_OUT or .)");
  compile->add_flag("--recompile", compile_args.recompile, "Ignore cached outputs");

  MeasureArgs measure_args;
  auto* measure = app.add_subcommand("measure", "Run every case under every runtime");
  measure->add_option("--manifest", measure_args.manifest_path, "Manifest JSON path")
      ->required();
  measure->add_option("--out", measure_args.out_dir,
                      "Output directory (default $WARPDIFF_OUT or .)");
  measure->add_option("--reps", measure_args.reps, "Measured repetitions (default 10)");
  measure->add_option("--warmup", measure_args.warmup, "Discarded warmup runs (default 1)");
  measure->add_option("--timeout", measure_args.timeout_s, "Per-run timeout seconds");
  measure->add_option("--interleaving", measure_args.interleaving, "by_case|by_runtime");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Rank anomalies in a timing matrix CSV");
  analyze->add_option("--in", analyze_args.in_path, "Matrix CSV (default stdin)");
  analyze->add_option("--out", analyze_args.out_path, "Report JSON (default stdout)");
  analyze->add_option("--exclusions", analyze_args.exclusions_path,
                      "Exclusions JSON to carry into the report");
  analyze->add_option("--manifest", analyze_args.manifest_path,
                      "Manifest to digest into config_digest");
  analyze->add_option("--stage-init", analyze_args.stage_init, "Init-stage matrix CSV");
  analyze->add_option("--stage-load", analyze_args.stage_load, "Load-stage matrix CSV");
  analyze->add_option("--stage-exec", analyze_args.stage_exec, "Exec-stage matrix CSV");
  analyze->add_option("--stage-top", analyze_args.stage_top,
                      "Locate stages for this many top cases (default 10)");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Render a report JSON as a table");
  report->add_option("--in", report_args.in_path, "Report JSON (default stdin)");
  report->add_option("--out", report_args.out_path, "Output file (default stdout)");
  report->add_option("--format", report_args.format, "json|md|txt (default txt)");
  report->add_option("--top", report_args.top, "Rows to render (default 10)");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic timing matrix");
  simulate->add_option("--seed", simulate_args.seed, "Generator seed (default 1)");
  simulate->add_option("--cases", simulate_args.cases, "Simulated cases (default 120)");
  simulate->add_option("--runtimes", simulate_args.runtimes,
                       "Simulated runtime settings (default 7)");
  simulate->add_option("--noise", simulate_args.noise,
                       "Lognormal noise sigma (default 0.05)");
  simulate->add_option("--inject", simulate_args.inject,
                       "Multiply one cell: <case_index>:<runtime_index>:<factor>");
  simulate->add_option("--out", simulate_args.out_path, "Matrix CSV (default stdout)");
  simulate->add_option("--stages-out", simulate_args.stages_out,
                       "Also write per-stage matrices into this directory");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench-overhead",
                                   "Time the analysis step on one matrix");
  bench->add_option("--in", bench_args.in_path, "Matrix CSV (default: simulated)");
  bench->add_option("--cases", bench_args.cases, "Simulated cases (default 123)");
  bench->add_option("--runtimes", bench_args.runtimes,
                    "Simulated runtime settings (default 7)");
  bench->add_option("--seed", bench_args.seed, "Generator seed (default 1)");
  bench->add_option("--repeat", bench_args.repeat, "Timed repetitions (default 10)");
  bench->add_option("--top", bench_args.top, "Rows rendered per run (default 10)");
  bench->add_option("--budget-s", bench_args.budget_s,
                    "Exit 1 when the mean exceeds this many seconds");
  bench->add_option("--format", bench_args.format, "txt|json (default txt)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile->parsed()) return cmd_compile(compile_args);
    if (measure->parsed()) return cmd_measure(measure_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (report->parsed()) return cmd_report(report_args);
    if (simulate->parsed()) return cmd_simulate(simulate_args);
    if (bench->parsed()) return cmd_bench_overhead(bench_args);
  } catch (const Error& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
