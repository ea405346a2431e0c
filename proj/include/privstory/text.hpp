#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace privstory {

/// Case-fold (ASCII), trim, and collapse internal whitespace runs to one space.
[[nodiscard]] std::string normalize_name(std::string_view raw);

/// Removes a single leading list marker: "-", "*", "+", a bullet, or "12." / "12)".
[[nodiscard]] std::string_view strip_list_marker(std::string_view raw);

/// `normalize_name` after stripping a leading list marker.
[[nodiscard]] std::string normalize_label(std::string_view raw);

[[nodiscard]] std::string_view trim(std::string_view s);
[[nodiscard]] std::string to_lower(std::string_view s);
[[nodiscard]] bool iequals(std::string_view a, std::string_view b);

/// Splits on '\n', dropping a trailing '\r' from each line.
[[nodiscard]] std::vector<std::string_view> split_lines(std::string_view text);

[[nodiscard]] bool is_valid_utf8(std::string_view bytes);

/// Lower-case hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::string_view data);

}  // namespace privstory
