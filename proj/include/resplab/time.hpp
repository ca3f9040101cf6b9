#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace resplab {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now_utc();

// "2026-10-14T08:30:00.250Z"; always UTC with millisecond precision.
std::string format_rfc3339(Timestamp t);

// Accepts fractional seconds of any length (truncated to ms) and either
// "Z" or a numeric "+hh:mm" offset. Throws Error(SchemaViolation).
Timestamp parse_rfc3339(std::string_view text);

}  // namespace resplab
