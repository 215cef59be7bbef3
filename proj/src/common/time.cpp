#include "fpsel/common/time.hpp"

#include <charconv>
#include <cstdio>

#include "fpsel/common/error.hpp"

namespace fpsel {
namespace {

int read_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) throw DataError("truncated timestamp '" + std::string(text) + "'");
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + count, value);
  if (ec != std::errc() || ptr != text.data() + pos + count) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
}

}  // namespace

TimePoint parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const int y = read_digits(text, 0, 4);
  expect(text, 4, '-');
  const int mo = read_digits(text, 5, 2);
  expect(text, 7, '-');
  const int d = read_digits(text, 8, 2);
  if (text.size() < 19 || (text[10] != 'T' && text[10] != ' ')) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
  const int h = read_digits(text, 11, 2);
  expect(text, 13, ':');
  const int mi = read_digits(text, 14, 2);
  expect(text, 16, ':');
  const int s = read_digits(text, 17, 2);
  std::size_t pos = 19;
  int ms = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int scale = 100;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      ms += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
  }
  const std::string_view zone = text.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00")) {
    throw DataError("only UTC timestamps are supported: '" + std::string(text) + "'");
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw DataError("invalid calendar timestamp '" + std::string(text) + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

std::string format_iso8601(TimePoint t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buffer[40];
  const long long ms = tod.subseconds().count();
  if (ms == 0) {
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
  } else {
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()), ms);
  }
  return buffer;
}

}  // namespace fpsel
