#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace forge::io {

/// Reads a whole JSON document. Syntax errors become ParseError carrying the
/// 1-based line of the offending byte.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Calls `fn(line_number, value)` for every non-blank line of a JSON Lines
/// file. Syntax errors become ParseError naming the line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const nlohmann::json&)>& fn);

/// Writes one compact JSON value per line (keys in sorted order).
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace forge::io
