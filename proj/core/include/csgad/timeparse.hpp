#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace csgad {

/// Parse an ISO-8601 UTC timestamp ("2017-02-12T21:59:59Z", optional
/// fractional seconds, optional "+00:00"/"-00:00" offset) to epoch seconds.
/// Fractional seconds are truncated. Returns nullopt on malformed input or
/// non-UTC offsets.
std::optional<std::int64_t> parse_iso8601_utc(std::string_view text);

/// Epoch seconds -> "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(std::int64_t epoch_seconds);

}  // namespace csgad
