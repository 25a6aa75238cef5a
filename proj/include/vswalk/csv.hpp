#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vswalk {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

// RFC 4180: CRLF line endings, fields quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace vswalk
