#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace csicl {

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s) noexcept;

/// Splits on runs of ASCII whitespace; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string to_lower_ascii(std::string_view s);

/// Index of the last case-insensitive (ASCII) occurrence of needle, or npos.
std::size_t rfind_icase(std::string_view haystack, std::string_view needle) noexcept;

/// printf("%.*f") in the C locale.
std::string format_fixed(double value, int decimals);

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames, so readers never observe
/// a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace csicl
