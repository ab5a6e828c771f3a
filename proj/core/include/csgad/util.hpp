#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace csgad {

/// Shortest round-trip decimal for a double (17 significant digits).
std::string format_double(double value);

/// CSV field escaping per RFC 4180: quoted iff the field contains a comma,
/// quote, or newline.
std::string csv_escape(std::string_view field);

/// Split one CSV line into fields, honoring double-quoted fields.
std::vector<std::string> csv_split(std::string_view line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// FNV-1a 64-bit over a byte string, hex-encoded. Stable across platforms;
/// used for config digests, not security.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace csgad
