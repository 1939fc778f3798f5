#include "warpdiff/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace warpdiff {

namespace {

void check_csv_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",\r\n\"") != std::string::npos) {
    raise(errc::io_error, "id '" + id + "' cannot be represented in the CSV format");
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

void write_matrix_csv(const TimingMatrix& m, std::ostream& out) {
  out << "case_id";
  for (const auto& rt : m.runtime_ids) {
    check_csv_id(rt);
    out << ',' << rt;
  }
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < m.n_cases(); ++i) {
    check_csv_id(m.case_ids[i]);
    out << m.case_ids[i];
    for (std::size_t j = 0; j < m.n_runtimes(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.at(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::string matrix_to_csv(const TimingMatrix& m) {
  std::ostringstream out;
  write_matrix_csv(m, out);
  return out.str();
}

TimingMatrix read_matrix_csv(std::istream& in, Stage stage) {
  TimingMatrix m;
  m.stage = stage;

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < 2 || fields[0] != "case_id") {
        raise(errc::parse_error,
              "line " + std::to_string(line_no) +
                  ": expected header 'case_id,<runtime ids...>'");
      }
      m.runtime_ids.assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != m.runtime_ids.size() + 1) {
      raise(errc::parse_error,
            "line " + std::to_string(line_no) + ": expected " +
                std::to_string(m.runtime_ids.size() + 1) + " fields, got " +
                std::to_string(fields.size()));
    }
    m.case_ids.push_back(fields[0]);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const std::string& field = fields[j];
      char* end = nullptr;
      double v = std::strtod(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size()) {
        raise(errc::parse_error,
              "line " + std::to_string(line_no) + ": '" + field + "' is not a number");
      }
      m.values.push_back(v);
    }
  }
  if (!have_header) {
    raise(errc::parse_error, "empty CSV input");
  }
  return m;
}

TimingMatrix matrix_from_csv(const std::string& text, Stage stage) {
  std::istringstream in(text);
  return read_matrix_csv(in, stage);
}

}  // namespace warpdiff
