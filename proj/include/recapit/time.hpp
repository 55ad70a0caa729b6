#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace recapit {

// Seconds since the Unix epoch (UTC) for an ISO 8601 timestamp. Accepts the
// extended (`2024-05-01T10:00:00.5Z`) and basic (`20240501T100000Z`) forms,
// with `Z`, `+hh:mm`, `+hhmm` or no zone designator (taken as UTC).
std::optional<double> parse_iso8601(std::string_view text);

// `YYYY-MM-DDThh:mm:ssZ`, whole seconds.
std::string format_iso8601(double epoch_seconds);

// "mm:ss" or "h:mm:ss" for session-relative times.
std::string format_clock(double seconds);

}  // namespace recapit
