#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpdiff/types.hpp"

namespace warpdiff {

/// Estimated oracle ratio: the plain mean of all normalized (unit) time
/// vectors, deliberately not re-normalized. Its Euclidean norm is therefore
/// in (0, 1] and every component is positive.
struct OracleVector {
  std::vector<std::string> runtime_ids;
  std::vector<double> components;
  std::size_t n_cases = 0;

  std::size_t size() const { return components.size(); }
  void validate() const;
  bool operator==(const OracleVector&) const = default;
};

/// Full per-case analysis result. `deviation_degrees[j]` is the signed,
/// length-normalized adjustment of dimension j that would bring the case's
/// vector closest to the oracle: positive means the runtime ran slower than
/// the oracle ratio predicts. `located_runtime` is the runtime with the
/// largest degree, present only when that degree is positive.
struct CaseAnalysis {
  std::string case_id;
  std::vector<double> raw_vector;
  std::vector<double> unit_vector;
  double distance = 0.0;
  std::vector<double> deviation_degrees;
  std::optional<std::string> located_runtime;
  std::optional<double> located_degree;

  bool operator==(const CaseAnalysis&) const = default;
};

/// Which execution stage carries an anomaly: the stage where the named
/// runtime's deviation degree (against that stage's own oracle) is maximal.
struct StageLocation {
  std::string case_id;
  std::string runtime_id;
  Stage stage = Stage::exec;
  std::map<Stage, double> per_stage_degrees;

  bool operator==(const StageLocation&) const = default;
};

/// Zero entries in per-stage rows are lifted to this floor before
/// normalization (interpreter runtimes can report ~0 load time).
inline constexpr double kStageFloorSeconds = 1e-6;

/// Degrees at or below this threshold never locate a runtime; it absorbs the
/// floating-point residue of exactly-proportional rows.
inline constexpr double kLocatedDegreeFloor = 1e-9;

/// v / ||v||2. Requires k >= 2 finite positive entries. Proportional inputs
/// map to identical outputs; that scale invariance is the whole point.
std::vector<double> normalize_vector(std::span<const double> v);

/// Mean of the unit vectors of all rows. Component sums run in row order so
/// results are bit-stable.
OracleVector estimate_oracle(const TimingMatrix& m);

/// Euclidean distance between a unit vector and the oracle.
double case_distance(std::span<const double> unit_v, const OracleVector& oracle);

/// Closed-form optimal replacement for dimension j: the value x* that, with
/// all other coordinates held fixed, minimizes the distance between the
/// re-normalized adjusted vector and the oracle. With s = sum_{i!=j} v_i^2
/// and c = sum_{i!=j} v_i * o_i, the minimizer is x* = o_j * s / c.
double optimal_replacement(std::span<const double> raw_v, std::size_t j,
                           const OracleVector& oracle);

/// d_j = (v_j - x*_j) / ||v||2 for every dimension.
std::vector<double> deviation_degrees(std::span<const double> raw_v,
                                      const OracleVector& oracle);

/// Bundles normalize_vector, case_distance and deviation_degrees. Ties in the
/// located-runtime argmax break toward the lexicographically smallest id.
CaseAnalysis analyze_case(std::string case_id, std::span<const double> raw_v,
                          const OracleVector& oracle);

/// Computes the oracle once from all rows, analyzes every case, and sorts:
/// located cases by located_degree descending first, the remainder by
/// distance descending, all ties by case_id ascending. No threshold is
/// applied; consumers choose their own top-N.
std::vector<CaseAnalysis> rank_cases(const TimingMatrix& m);

/// Re-applies the analysis per stage and reports the stage where
/// `runtime_id`'s deviation degree is maximal for `case_id`. The map must
/// contain init, load and exec matrices with identical case/runtime ids.
StageLocation locate_abnormal_stage(const std::map<Stage, TimingMatrix>& stage_matrices,
                                    const std::string& case_id,
                                    const std::string& runtime_id);

}  // namespace warpdiff
