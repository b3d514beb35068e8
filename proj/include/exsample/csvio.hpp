#pragma once

#include <cstdint>
#include <fstream>
#include <string>

namespace exsample {

// Fixed-format number rendering so equal inputs always serialize to equal
// bytes; run outputs are compared byte-for-byte across executions.
std::string format_double(double v);

// Line-oriented CSV writer. The header is written on construction; cell()
// and row-ending end_row() build rows left to right.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);

  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(double v);
  void end_row();

 private:
  std::ofstream out_;
  bool row_open_ = false;
};

}  // namespace exsample
