#pragma once

#include <stdexcept>
#include <string>

namespace warpdiff {

/// Stable error codes surfaced across module boundaries. The CLI maps every
/// code to a diagnostic on stderr and a nonzero exit status.
enum class errc {
  non_positive_entry,
  too_few_runtimes,
  duplicate_id,
  dimension_mismatch,
  degenerate_oracle,
  missing_case,
  missing_runtime,
  all_stages_non_positive,
  index_out_of_range,
  empty_matrix,
  spawn_failure,
  probe_parse_failure,
  parse_error,
  validation_error,
  compiler_spawn_failure,
  compile_failure,
  io_error,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace warpdiff
