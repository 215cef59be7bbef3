#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <string_view>

namespace fpsel {

using Milliseconds = std::chrono::milliseconds;
/// UTC wall-clock instant with millisecond resolution.
using TimePoint = std::chrono::sys_time<Milliseconds>;

/// Parses `YYYY-MM-DDTHH:MM:SS[.fff][Z|+00:00]` (UTC only). A space is
/// accepted in place of `T`. Throws DataError on malformed input.
TimePoint parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`, with `.mmm` inserted when milliseconds are set.
std::string format_iso8601(TimePoint t);

inline TimePoint floor_hour(TimePoint t) {
  return std::chrono::floor<std::chrono::hours>(t);
}

inline double hours_between(TimePoint from, TimePoint to) {
  return std::chrono::duration<double, std::ratio<3600>>(to - from).count();
}

inline TimePoint add_seconds(TimePoint t, double seconds) {
  return t + Milliseconds(static_cast<long long>(std::llround(seconds * 1000.0)));
}

}  // namespace fpsel
