#pragma once

#include <string>
#include <vector>

namespace diffnet::experiment {

// Comma-separated table with a mandatory header row. Numbers are written
// with shortest-round-trip formatting and a '.' decimal separator,
// independent of the process locale, so identical data produces
// byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(const std::string& label, const std::vector<double>& values);
  void write(const std::string& path) const;

  std::size_t columns() const { return header_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

std::string format_double(double value);

}  // namespace diffnet::experiment
