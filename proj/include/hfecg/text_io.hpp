#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfecg {

std::string read_text_file(const std::filesystem::path &path);
// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delimiter);
std::vector<std::string_view> split_lines(std::string_view text);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

// Shortest representation that round-trips exactly.
std::string format_double(double value);

// `key=value` from a `# key=value` comment line, if it is one.
std::optional<std::pair<std::string_view, std::string_view>>
parse_comment_pair(std::string_view line);

} // namespace hfecg
