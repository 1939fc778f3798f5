#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "warpdiff/analysis.hpp"
#include "warpdiff/executor.hpp"
#include "warpdiff/types.hpp"

namespace warpdiff {

enum class ReportFormat { json, md, txt };

/// Everything a consumer needs from one analysis run. `top_cases` holds the
/// full ranking in rank_cases order; renderers pick their own top-N.
struct Report {
  std::int64_t generated_at_unix = 0;
  std::string config_digest;
  OracleVector oracle;
  std::vector<CaseAnalysis> top_cases;
  std::vector<ExclusionRecord> exclusions;
  std::vector<StageLocation> stage_locations;

  bool operator==(const Report&) const = default;
};

struct AnalyzeOptions {
  std::string config_digest;
  std::vector<ExclusionRecord> exclusions;
  std::map<Stage, TimingMatrix> stage_matrices;  // all three or none
  int stage_top_n = 10;                          // locate stages for this many top cases
  std::int64_t generated_at_unix = 0;            // 0 = use current time
};

/// The full analysis pipeline on one matrix: validate, rank, estimate the
/// oracle, and (when stage matrices are supplied) locate the abnormal stage
/// for the top located cases.
Report analyze_to_report(const TimingMatrix& matrix, const AnalyzeOptions& options);

/// Renders up to top_n table rows, one column per runtime setting, cells
/// showing deviation degrees to 3 decimals with the issue-related runtime's
/// cell marked ([x.xxx] in text, **x.xxx** in markdown). Only cases with a
/// located runtime appear as rows; JSON output carries the full report.
/// Output bytes are deterministic for a given report.
std::string render_table(const Report& report, int top_n,
                         ReportFormat format = ReportFormat::txt);

}  // namespace warpdiff
