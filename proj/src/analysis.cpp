#include "warpdiff/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace warpdiff {

namespace {

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void check_positive(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || !(v[i] > 0.0)) {
      raise(errc::non_positive_entry,
            std::string(what) + " component " + std::to_string(i) +
                " must be finite and > 0 (got " + std::to_string(v[i]) + ")");
    }
  }
}

}  // namespace

void OracleVector::validate() const {
  if (components.size() != runtime_ids.size()) {
    raise(errc::dimension_mismatch, "oracle ids and components disagree in length");
  }
  if (components.size() < 2) {
    raise(errc::too_few_runtimes, "oracle needs at least 2 components");
  }
  for (double c : components) {
    if (!std::isfinite(c) || !(c > 0.0)) {
      raise(errc::degenerate_oracle, "oracle components must be finite and > 0");
    }
  }
  double norm = l2_norm(components);
  if (!(norm > 0.0) || norm > 1.0 + 1e-9) {
    raise(errc::degenerate_oracle,
          "oracle norm must lie in (0, 1], got " + std::to_string(norm));
  }
}

std::vector<double> normalize_vector(std::span<const double> v) {
  if (v.size() < 2) {
    raise(errc::too_few_runtimes,
          "time vector needs at least 2 components, got " + std::to_string(v.size()));
  }
  check_positive(v, "time vector");
  double norm = l2_norm(v);
  std::vector<double> unit(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) unit[i] = v[i] / norm;
  return unit;
}

OracleVector estimate_oracle(const TimingMatrix& m) {
  TimingMatrix valid = validate_matrix(m);
  const std::size_t n = valid.n_cases();
  const std::size_t k = valid.n_runtimes();

  std::vector<double> sum(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> unit = normalize_vector(valid.row(i));
    for (std::size_t j = 0; j < k; ++j) sum[j] += unit[j];
  }
  OracleVector oracle;
  oracle.runtime_ids = valid.runtime_ids;
  oracle.components.resize(k);
  for (std::size_t j = 0; j < k; ++j) oracle.components[j] = sum[j] / double(n);
  oracle.n_cases = n;
  return oracle;
}

double case_distance(std::span<const double> unit_v, const OracleVector& oracle) {
  if (unit_v.size() != oracle.components.size()) {
    raise(errc::dimension_mismatch,
          "vector has " + std::to_string(unit_v.size()) + " components, oracle has " +
              std::to_string(oracle.components.size()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < unit_v.size(); ++j) {
    double d = unit_v[j] - oracle.components[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double optimal_replacement(std::span<const double> raw_v, std::size_t j,
                           const OracleVector& oracle) {
  const std::size_t k = raw_v.size();
  if (k != oracle.components.size()) {
    raise(errc::dimension_mismatch, "vector and oracle dimensions disagree");
  }
  if (j >= k) {
    raise(errc::index_out_of_range, "dimension index out of range");
  }
  double s = 0.0;  // sum of squares over the held-fixed coordinates
  double c = 0.0;  // their correlation with the oracle
  for (std::size_t i = 0; i < k; ++i) {
    if (i == j) continue;
    s += raw_v[i] * raw_v[i];
    c += raw_v[i] * oracle.components[i];
  }
  if (!(c > 0.0)) {
    // Unreachable with positive inputs; guards imported data.
    raise(errc::degenerate_oracle,
          "held-fixed coordinates are uncorrelated with the oracle (c <= 0)");
  }
  return oracle.components[j] * s / c;
}

std::vector<double> deviation_degrees(std::span<const double> raw_v,
                                      const OracleVector& oracle) {
  if (raw_v.size() < 2) {
    raise(errc::too_few_runtimes, "deviation degrees need at least 2 dimensions");
  }
  if (raw_v.size() != oracle.components.size()) {
    raise(errc::dimension_mismatch, "vector and oracle dimensions disagree");
  }
  check_positive(raw_v, "time vector");
  for (double c : oracle.components) {
    if (!std::isfinite(c) || !(c > 0.0)) {
      raise(errc::degenerate_oracle, "oracle components must be finite and > 0");
    }
  }

  double norm = l2_norm(raw_v);
  std::vector<double> degrees(raw_v.size());
  for (std::size_t j = 0; j < raw_v.size(); ++j) {
    degrees[j] = (raw_v[j] - optimal_replacement(raw_v, j, oracle)) / norm;
  }
  return degrees;
}

CaseAnalysis analyze_case(std::string case_id, std::span<const double> raw_v,
                          const OracleVector& oracle) {
  CaseAnalysis result;
  result.case_id = std::move(case_id);
  result.raw_vector.assign(raw_v.begin(), raw_v.end());
  result.unit_vector = normalize_vector(raw_v);
  result.distance = case_distance(result.unit_vector, oracle);
  result.deviation_degrees = deviation_degrees(raw_v, oracle);

  // A case cannot be "caused" by a runtime that is faster than expected, so
  // only a positive maximum locates a runtime.
  std::size_t best = 0;
  for (std::size_t j = 1; j < result.deviation_degrees.size(); ++j) {
    double d = result.deviation_degrees[j];
    if (d > result.deviation_degrees[best] ||
        (d == result.deviation_degrees[best] &&
         oracle.runtime_ids[j] < oracle.runtime_ids[best])) {
      best = j;
    }
  }
  if (result.deviation_degrees[best] > kLocatedDegreeFloor) {
    result.located_runtime = oracle.runtime_ids[best];
    result.located_degree = result.deviation_degrees[best];
  }
  return result;
}

std::vector<CaseAnalysis> rank_cases(const TimingMatrix& m) {
  TimingMatrix valid = validate_matrix(m);
  OracleVector oracle = estimate_oracle(valid);

  std::vector<CaseAnalysis> analyses;
  analyses.reserve(valid.n_cases());
  for (std::size_t i = 0; i < valid.n_cases(); ++i) {
    analyses.push_back(analyze_case(valid.case_ids[i], valid.row(i), oracle));
  }

  std::stable_sort(analyses.begin(), analyses.end(),
                   [](const CaseAnalysis& a, const CaseAnalysis& b) {
                     if (a.located_degree.has_value() != b.located_degree.has_value()) {
                       return a.located_degree.has_value();
                     }
                     if (a.located_degree && b.located_degree &&
                         *a.located_degree != *b.located_degree) {
                       return *a.located_degree > *b.located_degree;
                     }
                     if (!a.located_degree && a.distance != b.distance) {
                       return a.distance > b.distance;
                     }
                     return a.case_id < b.case_id;
                   });
  return analyses;
}

namespace {

TimingMatrix floored(TimingMatrix m) {
  for (double& v : m.values) {
    if (v == 0.0) v = kStageFloorSeconds;
  }
  return m;
}

}  // namespace

StageLocation locate_abnormal_stage(const std::map<Stage, TimingMatrix>& stage_matrices,
                                    const std::string& case_id,
                                    const std::string& runtime_id) {
  static constexpr Stage kStages[] = {Stage::init, Stage::load, Stage::exec};

  std::map<Stage, TimingMatrix> validated;
  for (Stage s : kStages) {
    auto it = stage_matrices.find(s);
    if (it == stage_matrices.end()) {
      raise(errc::validation_error,
            std::string("stage matrices must include init, load and exec; missing ") +
                to_string(s));
    }
    validated.emplace(s, validate_matrix(it->second));
  }

  const TimingMatrix& first = validated.at(Stage::init);
  for (Stage s : {Stage::load, Stage::exec}) {
    const TimingMatrix& other = validated.at(s);
    if (other.case_ids != first.case_ids || other.runtime_ids != first.runtime_ids) {
      raise(errc::dimension_mismatch, "stage matrices do not share case/runtime orderings");
    }
  }

  auto row_idx = first.case_index(case_id);
  if (!row_idx) {
    raise(errc::missing_case, "case '" + case_id + "' not present in stage matrices");
  }
  auto col_idx = first.runtime_index(runtime_id);
  if (!col_idx) {
    raise(errc::missing_runtime, "runtime '" + runtime_id + "' not present in stage matrices");
  }

  bool any_positive = false;
  for (Stage s : kStages) {
    for (double v : validated.at(s).row(*row_idx)) {
      any_positive = any_positive || v > 0.0;
    }
  }
  if (!any_positive) {
    raise(errc::all_stages_non_positive,
          "case '" + case_id + "' has no positive entry in any stage");
  }

  StageLocation location;
  location.case_id = case_id;
  location.runtime_id = runtime_id;
  for (Stage s : kStages) {
    TimingMatrix stage_matrix = floored(validated.at(s));
    OracleVector oracle = estimate_oracle(stage_matrix);
    CaseAnalysis analysis = analyze_case(case_id, stage_matrix.row(*row_idx), oracle);
    location.per_stage_degrees[s] = analysis.deviation_degrees[*col_idx];
  }

  location.stage = Stage::init;
  for (Stage s : {Stage::load, Stage::exec}) {
    if (location.per_stage_degrees[s] > location.per_stage_degrees[location.stage]) {
      location.stage = s;
    }
  }
  return location;
}

}  // namespace warpdiff
