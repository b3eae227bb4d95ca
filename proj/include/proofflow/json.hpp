#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace proofflow {

// Insertion-ordered so every file we write has a stable, documented key order.
using Json = nlohmann::ordered_json;

Json read_json_file(const std::filesystem::path& path);

/// Writes `value` pretty-printed with a trailing newline, creating parent directories.
void write_json_file(const std::filesystem::path& path, const Json& value);

/// Parses the first top-level JSON object embedded in `text` (model output
/// often wraps it in prose or code fences). Throws ParseError.
Json extract_json_object(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace proofflow
