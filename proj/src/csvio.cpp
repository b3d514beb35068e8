#include "exsample/csvio.hpp"

#include <cstdio>
#include <stdexcept>

namespace exsample {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header)
    : out_(path) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  out_ << header << "\n";
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (row_open_) out_ << ",";
  out_ << v;
  row_open_ = true;
  return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(std::int64_t v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

void CsvWriter::end_row() {
  out_ << "\n";
  row_open_ = false;
}

}  // namespace exsample
