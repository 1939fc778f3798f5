#include "warpdiff/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "warpdiff/json_io.hpp"

namespace warpdiff {

namespace {

std::string fmt3(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string fmt4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

}  // namespace

Report analyze_to_report(const TimingMatrix& matrix, const AnalyzeOptions& options) {
  TimingMatrix validated = validate_matrix(matrix);

  Report report;
  report.generated_at_unix =
      options.generated_at_unix != 0
          ? options.generated_at_unix
          : std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
  report.config_digest = options.config_digest;
  report.oracle = estimate_oracle(validated);
  report.top_cases = rank_cases(validated);
  report.exclusions = options.exclusions;

  if (!options.stage_matrices.empty()) {
    int remaining = options.stage_top_n;
    for (const CaseAnalysis& analysis : report.top_cases) {
      if (remaining <= 0) break;
      if (!analysis.located_runtime) break;  // ranking puts located cases first
      report.stage_locations.push_back(locate_abnormal_stage(
          options.stage_matrices, analysis.case_id, *analysis.located_runtime));
      --remaining;
    }
  }
  return report;
}

namespace {

std::string render_txt(const Report& report, int top_n) {
  std::ostringstream out;
  const auto& runtime_ids = report.oracle.runtime_ids;

  out << "oracle ratio (mean of " << report.oracle.n_cases << " unit time vectors):\n";
  for (std::size_t j = 0; j < runtime_ids.size(); ++j) {
    out << "  " << runtime_ids[j] << " = " << fmt4(report.oracle.components[j]) << "\n";
  }
  if (!report.exclusions.empty()) {
    out << "excluded cases: " << report.exclusions.size() << "\n";
    for (const auto& e : report.exclusions) {
      out << "  " << e.case_id << " (" << to_string(e.reason);
      if (e.runtime_id) out << " on " << *e.runtime_id;
      out << ")\n";
    }
  }
  out << "\n";

  std::vector<const CaseAnalysis*> rows;
  for (const CaseAnalysis& c : report.top_cases) {
    if (!c.located_runtime) break;
    rows.push_back(&c);
    if (int(rows.size()) >= top_n) break;
  }

  if (rows.empty()) {
    out << "no abnormal cases\n";
    return out.str();
  }

  out << "case";
  for (const auto& rt : runtime_ids) out << " | " << rt;
  out << "\n";
  for (const CaseAnalysis* c : rows) {
    out << c->case_id;
    for (std::size_t j = 0; j < runtime_ids.size(); ++j) {
      bool marked = c->located_runtime && *c->located_runtime == runtime_ids[j];
      out << " | " << (marked ? "[" + fmt3(c->deviation_degrees[j]) + "]"
                              : fmt3(c->deviation_degrees[j]));
    }
    out << "\n";
  }

  if (!report.stage_locations.empty()) {
    out << "\nabnormal stages:\n";
    for (const StageLocation& loc : report.stage_locations) {
      out << "  " << loc.case_id << " @ " << loc.runtime_id << ": "
          << to_string(loc.stage) << " (";
      bool first = true;
      for (Stage s : {Stage::init, Stage::load, Stage::exec}) {
        auto it = loc.per_stage_degrees.find(s);
        if (it == loc.per_stage_degrees.end()) continue;
        if (!first) out << ", ";
        out << to_string(s) << "=" << fmt3(it->second);
        first = false;
      }
      out << ")\n";
    }
  }
  return out.str();
}

std::string render_md(const Report& report, int top_n) {
  std::ostringstream out;
  const auto& runtime_ids = report.oracle.runtime_ids;

  out << "| case |";
  for (const auto& rt : runtime_ids) out << " " << rt << " |";
  out << "\n|---|";
  for (std::size_t j = 0; j < runtime_ids.size(); ++j) out << "---|";
  out << "\n";

  int rendered = 0;
  for (const CaseAnalysis& c : report.top_cases) {
    if (!c.located_runtime || rendered >= top_n) break;
    out << "| `" << c.case_id << "` |";
    for (std::size_t j = 0; j < runtime_ids.size(); ++j) {
      bool marked = *c.located_runtime == runtime_ids[j];
      out << " " << (marked ? "**" + fmt3(c.deviation_degrees[j]) + "**"
                            : fmt3(c.deviation_degrees[j]))
          << " |";
    }
    out << "\n";
    ++rendered;
  }
  if (rendered == 0) {
    out << "\nno abnormal cases\n";
    return out.str();
  }

  if (!report.stage_locations.empty()) {
    out << "\n| case | runtime | stage | init | load | exec |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const StageLocation& loc : report.stage_locations) {
      out << "| `" << loc.case_id << "` | " << loc.runtime_id << " | "
          << to_string(loc.stage);
      for (Stage s : {Stage::init, Stage::load, Stage::exec}) {
        auto it = loc.per_stage_degrees.find(s);
        out << " | " << (it == loc.per_stage_degrees.end() ? "-" : fmt3(it->second));
      }
      out << " |\n";
    }
  }
  return out.str();
}

}  // namespace

std::string render_table(const Report& report, int top_n, ReportFormat format) {
  if (top_n < 1) {
    raise(errc::validation_error, "top_n must be >= 1");
  }
  switch (format) {
    case ReportFormat::json: {
      nlohmann::json j = report;
      return j.dump(2) + "\n";
    }
    case ReportFormat::md:
      return render_md(report, top_n);
    case ReportFormat::txt:
      return render_txt(report, top_n);
  }
  return {};
}

}  // namespace warpdiff
