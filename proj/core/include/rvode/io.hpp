#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rvode {

// 17 significant digits, '.' decimal separator, locale independent; the
// round-trip format used by every CSV and report writer.
std::string fmt(double v);
// empty string for NaN (CSV convention for undefined fields)
std::string fmt_opt(double v);

std::uint64_t fnv1a64(std::string_view bytes);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& cells);
  bool good() const { return out_.good(); }

 private:
  std::ofstream out_;
};

// Two-column numeric CSV; a non-numeric first line is treated as a header.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace rvode
