#include "rtopf/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rtopf {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (filled_ == columns_) throw std::logic_error("csv: too many cells in row");
  if (filled_ > 0) out_ += ',';
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    out_ += text;
  } else {
    out_ += '"';
    for (char c : text) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  }
  ++filled_;
  return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_number(x)); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv: row has the wrong number of cells");
  out_ += '\n';
  filled_ = 0;
}

}  // namespace rtopf
