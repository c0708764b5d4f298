#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace ofnet {

using Milliseconds = std::chrono::milliseconds;
using Seconds = std::chrono::seconds;

/// UTC instant at millisecond resolution. All library time is injected, never read ambiently.
using TimePoint = std::chrono::sys_time<Milliseconds>;

/// Unix time of 2001-01-01T00:00:00Z, the epoch of report timestamps.
inline constexpr std::int64_t kAppleEpochUnixSeconds = 978307200;

inline std::int64_t to_unix_ms(TimePoint t) { return t.time_since_epoch().count(); }
inline TimePoint from_unix_ms(std::int64_t ms) { return TimePoint{Milliseconds{ms}}; }

/// Seconds since 2001-01-01, truncated. Throws RangeError outside the 32-bit range.
std::uint32_t to_apple_seconds(TimePoint t);
TimePoint from_apple_seconds(std::uint32_t s);

/// `YYYY-MM-DDTHH:MM:SS[.fff]Z`; always prints milliseconds.
std::string format_iso8601(TimePoint t);

/// Accepts `YYYY-MM-DD[T ]HH:MM:SS[.fraction][Z|+HH:MM|-HH:MM]` or a bare date.
/// Throws FormatError.
TimePoint parse_iso8601(std::string_view text);

}  // namespace ofnet
