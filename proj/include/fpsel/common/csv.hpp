#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fpsel::csv {

/// Line-oriented reader for the plain comma-separated files this project
/// writes (no quoting, no embedded commas). Row numbers are 1-based and
/// count the header line.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the header line; throws DataError when the file is empty.
  std::vector<std::string> header();

  /// Fills `fields` with the next row; false at end of input. Blank lines
  /// are skipped.
  bool next(std::vector<std::string_view>& fields);

  std::size_t row() const { return row_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t row_ = 0;
};

std::vector<std::string_view> split(std::string_view line);

/// Strict number parsing; throws LoadError naming row/column on failure or
/// when the value is not finite.
double parse_double(std::string_view field, std::size_t row, const std::string& column);
long long parse_int(std::string_view field, std::size_t row, const std::string& column);

/// Shortest representation that parses back to the identical double.
std::string format_double(double value);

/// Joins fields with commas and writes a trailing newline.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace fpsel::csv
