#include "warpdiff/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace warpdiff {

const char* to_string(ExecMode m) noexcept {
  return m == ExecMode::aot ? "aot" : "interpreter";
}

const char* to_string(StageProbe p) noexcept {
  return p == StageProbe::none ? "none" : "external_profile";
}

const char* to_string(Stage s) noexcept {
  switch (s) {
    case Stage::total: return "total";
    case Stage::init: return "init";
    case Stage::load: return "load";
    case Stage::exec: return "exec";
  }
  return "total";
}

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::wrong_output: return "wrong_output";
    case RunStatus::runtime_error: return "runtime_error";
    case RunStatus::timeout: return "timeout";
  }
  return "ok";
}

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

void check_id(const std::string& id, const char* what) {
  if (id.empty()) {
    raise(errc::validation_error, std::string(what) + ": id must be non-empty");
  }
  if (id.find_first_of(",\r\n\"") != std::string::npos) {
    raise(errc::validation_error,
          std::string(what) + " id '" + id + "' contains a character reserved by the CSV format");
  }
}

}  // namespace

void RuntimeSpec::validate() const {
  check_id(id, "runtime");
  std::size_t wasm_count = count_occurrences(command_template, "{wasm}");
  if (wasm_count != 1) {
    raise(errc::validation_error,
          "runtime '" + id + "': command_template must contain {wasm} exactly once (found " +
              std::to_string(wasm_count) + ")");
  }
}

void TestCase::validate() const {
  check_id(id, "case");
  if (wasm_path.empty() && source_path.empty()) {
    raise(errc::validation_error,
          "case '" + id + "': needs wasm_path or source_path");
  }
}

void StageTiming::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!ok(init_s) || !ok(load_s) || !ok(exec_s) || !std::isfinite(total_s)) {
    raise(errc::validation_error, "stage timing has a negative or non-finite field");
  }
  if (!(total_s > 0.0)) {
    raise(errc::validation_error, "stage timing total_s must be > 0");
  }
  if (stages_present) {
    double gap = std::abs(init_s + load_s + exec_s - total_s);
    if (gap > 0.05 * total_s) {
      raise(errc::validation_error,
            "stage times deviate from total by more than 5% (gap " + std::to_string(gap) +
                "s of " + std::to_string(total_s) + "s)");
    }
  }
}

std::optional<std::size_t> TimingMatrix::case_index(const std::string& case_id) const {
  auto it = std::find(case_ids.begin(), case_ids.end(), case_id);
  if (it == case_ids.end()) return std::nullopt;
  return std::size_t(it - case_ids.begin());
}

std::optional<std::size_t> TimingMatrix::runtime_index(const std::string& runtime_id) const {
  auto it = std::find(runtime_ids.begin(), runtime_ids.end(), runtime_id);
  if (it == runtime_ids.end()) return std::nullopt;
  return std::size_t(it - runtime_ids.begin());
}

std::vector<double> TimingMatrix::row(std::size_t index) const {
  auto begin = values.begin() + index * runtime_ids.size();
  return std::vector<double>(begin, begin + runtime_ids.size());
}

namespace {

// Sort permutation over ids; reports the first duplicate found.
std::vector<std::size_t> sorted_permutation(const std::vector<std::string>& ids,
                                            const char* what) {
  std::vector<std::size_t> perm(ids.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  for (std::size_t i = 1; i < perm.size(); ++i) {
    if (ids[perm[i - 1]] == ids[perm[i]]) {
      raise(errc::duplicate_id,
            std::string(what) + " id '" + ids[perm[i]] + "' appears more than once");
    }
  }
  return perm;
}

}  // namespace

TimingMatrix validate_matrix(TimingMatrix m) {
  if (m.runtime_ids.size() < 2) {
    raise(errc::too_few_runtimes,
          "differential analysis needs at least 2 runtime settings, got " +
              std::to_string(m.runtime_ids.size()));
  }
  if (m.case_ids.empty()) {
    raise(errc::empty_matrix, "matrix has no case rows");
  }
  const std::size_t n = m.case_ids.size();
  const std::size_t k = m.runtime_ids.size();
  if (m.values.size() != n * k) {
    raise(errc::dimension_mismatch,
          "matrix has " + std::to_string(m.values.size()) + " values, expected " +
              std::to_string(n * k));
  }

  std::vector<std::size_t> row_perm = sorted_permutation(m.case_ids, "case");
  std::vector<std::size_t> col_perm = sorted_permutation(m.runtime_ids, "runtime");

  bool already_sorted =
      std::is_sorted(m.case_ids.begin(), m.case_ids.end()) &&
      std::is_sorted(m.runtime_ids.begin(), m.runtime_ids.end());
  if (!already_sorted) {
    TimingMatrix sorted;
    sorted.stage = m.stage;
    sorted.case_ids.reserve(n);
    sorted.runtime_ids.reserve(k);
    for (std::size_t i : row_perm) sorted.case_ids.push_back(m.case_ids[i]);
    for (std::size_t j : col_perm) sorted.runtime_ids.push_back(m.runtime_ids[j]);
    sorted.values.resize(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        sorted.values[i * k + j] = m.at(row_perm[i], col_perm[j]);
      }
    }
    m = std::move(sorted);
  }

  for (std::size_t i = 0; i < n; ++i) {
    bool row_has_positive = false;
    for (std::size_t j = 0; j < k; ++j) {
      double v = m.at(i, j);
      if (!std::isfinite(v)) {
        raise(errc::non_positive_entry,
              "non-finite entry at case '" + m.case_ids[i] + "', runtime '" +
                  m.runtime_ids[j] + "'");
      }
      if (m.stage == Stage::total) {
        if (!(v > 0.0)) {
          raise(errc::non_positive_entry,
                "total-stage entry must be > 0 at case '" + m.case_ids[i] +
                    "', runtime '" + m.runtime_ids[j] + "' (got " + std::to_string(v) + ")");
        }
      } else if (v < 0.0) {
        raise(errc::non_positive_entry,
              "negative entry at case '" + m.case_ids[i] + "', runtime '" +
                  m.runtime_ids[j] + "'");
      }
      row_has_positive = row_has_positive || v > 0.0;
    }
    if (!row_has_positive) {
      raise(errc::non_positive_entry,
            "case '" + m.case_ids[i] + "' has no positive entry in stage " +
                to_string(m.stage));
    }
  }
  return m;
}

}  // namespace warpdiff
