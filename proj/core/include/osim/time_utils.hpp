#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace osim {

// UTC timestamps are carried as epoch seconds (int64). Parsing accepts
// "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds (truncated),
// an optional 'Z' or +hh:mm / -hh:mm offset, and a space instead of 'T'.
std::optional<int64_t> parse_iso8601(const std::string& text);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(int64_t epoch_seconds);

} // namespace osim
