#pragma once

#include <json.hpp>

#include "warpdiff/analysis.hpp"
#include "warpdiff/corpus.hpp"
#include "warpdiff/executor.hpp"
#include "warpdiff/report.hpp"
#include "warpdiff/types.hpp"

namespace warpdiff {

// nlohmann ADL hooks. Round-tripping any of these values through JSON yields
// an equal value; doubles serialize with shortest-exact representation.

void to_json(nlohmann::json& j, const RuntimeSpec& v);
void from_json(const nlohmann::json& j, RuntimeSpec& v);

void to_json(nlohmann::json& j, const TestCase& v);
void from_json(const nlohmann::json& j, TestCase& v);

void to_json(nlohmann::json& j, const StageTiming& v);
void from_json(const nlohmann::json& j, StageTiming& v);

void to_json(nlohmann::json& j, const RunRecord& v);
void from_json(const nlohmann::json& j, RunRecord& v);

void to_json(nlohmann::json& j, const TimingMatrix& v);
void from_json(const nlohmann::json& j, TimingMatrix& v);

void to_json(nlohmann::json& j, const OracleVector& v);
void from_json(const nlohmann::json& j, OracleVector& v);

void to_json(nlohmann::json& j, const CaseAnalysis& v);
void from_json(const nlohmann::json& j, CaseAnalysis& v);

void to_json(nlohmann::json& j, const StageLocation& v);
void from_json(const nlohmann::json& j, StageLocation& v);

void to_json(nlohmann::json& j, const ExclusionRecord& v);
void from_json(const nlohmann::json& j, ExclusionRecord& v);

void to_json(nlohmann::json& j, const CompilerConfig& v);
void from_json(const nlohmann::json& j, CompilerConfig& v);

void to_json(nlohmann::json& j, const PlanDefaults& v);
void from_json(const nlohmann::json& j, PlanDefaults& v);

void to_json(nlohmann::json& j, const Manifest& v);
void from_json(const nlohmann::json& j, Manifest& v);

void to_json(nlohmann::json& j, const Report& v);
void from_json(const nlohmann::json& j, Report& v);

ExecMode exec_mode_from_string(const std::string& s);
StageProbe stage_probe_from_string(const std::string& s);
Stage stage_from_string(const std::string& s);
RunStatus run_status_from_string(const std::string& s);
Interleaving interleaving_from_string(const std::string& s);
ExclusionReason exclusion_reason_from_string(const std::string& s);

}  // namespace warpdiff
