#include "warpdiff/errors.hpp"

namespace warpdiff {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::non_positive_entry: return "NonPositiveEntry";
    case errc::too_few_runtimes: return "TooFewRuntimes";
    case errc::duplicate_id: return "DuplicateId";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::degenerate_oracle: return "DegenerateOracle";
    case errc::missing_case: return "MissingCase";
    case errc::missing_runtime: return "MissingRuntime";
    case errc::all_stages_non_positive: return "AllStagesNonPositive";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::empty_matrix: return "EmptyMatrix";
    case errc::spawn_failure: return "SpawnFailure";
    case errc::probe_parse_failure: return "ProbeParseFailure";
    case errc::parse_error: return "ParseError";
    case errc::validation_error: return "ValidationError";
    case errc::compiler_spawn_failure: return "CompilerSpawnFailure";
    case errc::compile_failure: return "CompileFailure";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace warpdiff
