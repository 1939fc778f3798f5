#pragma once

#include <iosfwd>
#include <string>

#include "warpdiff/types.hpp"

namespace warpdiff {

/// Matrix CSV layout: header `case_id,<runtime_id_1>,...,<runtime_id_k>`,
/// one row per case. Values are written with enough digits to round-trip
/// doubles exactly.
void write_matrix_csv(const TimingMatrix& m, std::ostream& out);
std::string matrix_to_csv(const TimingMatrix& m);

/// Parses the CSV layout above. The result is not canonicalized; run it
/// through validate_matrix before analysis.
TimingMatrix read_matrix_csv(std::istream& in, Stage stage = Stage::total);
TimingMatrix matrix_from_csv(const std::string& text, Stage stage = Stage::total);

}  // namespace warpdiff
