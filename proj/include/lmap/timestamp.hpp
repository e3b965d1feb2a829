#pragma once

#include <string>
#include <string_view>

namespace lmap {

// ISO-8601 UTC at the file boundary, seconds since the epoch in memory.
// Accepted forms: YYYY-MM-DDTHH:MM:SS[.fff...](Z|+HH:MM|-HH:MM), 'T' may be a space.
double parse_iso8601(std::string_view text);

// Whole seconds print without a fraction; otherwise microseconds are kept.
std::string format_iso8601(double seconds_since_epoch);

}  // namespace lmap
