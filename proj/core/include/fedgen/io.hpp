#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fedgen {

// Shortest decimal form that parses back to the identical double. All file
// formats in this project go through these two functions so that rewriting
// what was read is a byte-level no-op.
std::string format_double(double v);
double parse_double(std::string_view s);

std::int64_t parse_int(std::string_view s);
std::uint64_t parse_u64(std::string_view s);

std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, std::string_view content);

}  // namespace fedgen
