#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace privstory {

using json = nlohmann::ordered_json;

[[nodiscard]] std::string read_file(const std::filesystem::path &path);

/// Writes via a temporary sibling and rename so readers never see partial files.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

[[nodiscard]] json read_json_file(const std::filesystem::path &path);

/// Pretty-printed (2-space) JSON with a trailing newline.
void write_json_file(const std::filesystem::path &path, const json &value);

/// Maps a document id to a file-system-safe stem.
[[nodiscard]] std::string artifact_stem(std::string_view document_id);

}  // namespace privstory
