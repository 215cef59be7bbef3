#include "fpsel/common/csv.hpp"

#include <charconv>
#include <cmath>

#include "fpsel/common/error.hpp"

namespace fpsel::csv {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> Reader::header() {
  std::vector<std::string_view> fields;
  if (!next(fields)) throw DataError("empty CSV input: missing header");
  return {fields.begin(), fields.end()};
}

bool Reader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, line_)) {
    ++row_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.empty()) continue;
    fields = split(line_);
    return true;
  }
  return false;
}

double parse_double(std::string_view field, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw LoadError("cannot parse number '" + std::string(field) + "'", row, column);
  }
  if (!std::isfinite(value)) {
    throw LoadError("non-finite value '" + std::string(field) + "'", row, column);
  }
  return value;
}

long long parse_int(std::string_view field, std::size_t row, const std::string& column) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw LoadError("cannot parse integer '" + std::string(field) + "'", row, column);
  }
  return value;
}

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << fields[i];
  }
  out.put('\n');
}

}  // namespace fpsel::csv
