#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace csicl::unicode {

/// Writing-system families the harness distinguishes. Kana folds into han.
enum class Script { latin, hangul, han, telugu, arabic, other, none };

/// Decodes UTF-8; ill-formed sequences become U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);

/// Script family of a code point; `none` for digits, punctuation, marks and
/// other characters shared across scripts.
Script script_of(char32_t cp) noexcept;

bool is_punct(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;

/// Unicode NFKC normalization.
std::string nfkc(std::string_view utf8);

/// Full Unicode lowercase mapping (root locale). Caseless scripts pass through.
std::string to_lower(std::string_view utf8);

/// Strips leading/trailing punctuation and whitespace code points.
std::string trim_punct_space(std::string_view utf8);

}  // namespace csicl::unicode
