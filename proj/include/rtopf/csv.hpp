#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rtopf {

/// Shortest decimal text that reads back to exactly `x`; "nan"/"inf" spelled out.
std::string format_number(double x);

/// Minimal CSV writer: quotes a cell only when it holds a comma, quote or newline.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
  void end_row();

  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string out_;
};

}  // namespace rtopf
