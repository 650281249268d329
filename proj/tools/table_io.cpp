#include "table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace diffnet::experiment {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("csv: number formatting failed");
  return {buffer, end};
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) {
    throw std::invalid_argument("csv: row width does not match the header");
  }
  std::string row;
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (c > 0) row += ',';
    row += format_double(values[c]);
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::add_row(const std::string& label, const std::vector<double>& values) {
  if (values.size() + 1 != header_.size()) {
    throw std::invalid_argument("csv: row width does not match the header");
  }
  std::string row = label;
  for (double v : values) {
    row += ',';
    row += format_double(v);
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);  // fixed '\n' line endings
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  for (std::size_t c = 0; c < header_.size(); ++c) {
    if (c > 0) out << ',';
    out << header_[c];
  }
  out << '\n';
  for (const auto& row : rows_) out << row << '\n';
}

}  // namespace diffnet::experiment
