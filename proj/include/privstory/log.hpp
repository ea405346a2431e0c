#pragma once

#include <string_view>

namespace privstory {

/// Progress and diagnostics go to stderr; artifacts only ever go to files.
void set_verbose(bool verbose);
[[nodiscard]] bool verbose();

void log_info(std::string_view message);
void log_debug(std::string_view message);
void log_warn(std::string_view message);

}  // namespace privstory
