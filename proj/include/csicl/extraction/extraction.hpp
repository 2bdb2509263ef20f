#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csicl/promptkit/setting.hpp"

namespace csicl {

inline constexpr std::string_view kAnswerMarker = "The answer is";

enum class ExtractMethod { marker, bare_letter, last_line, whole_response, none };

std::string_view to_string(ExtractMethod m) noexcept;
ExtractMethod parse_extract_method(std::string_view s);

/// Parsed answer. `value` is empty exactly when the response is out of format.
struct Extracted {
  std::optional<std::string> value;
  bool out_of_format = true;
  ExtractMethod method = ExtractMethod::none;

  static Extracted none() { return {}; }
  static Extracted found(std::string v, ExtractMethod m) { return {std::move(v), false, m}; }
};

/// NFKC, lowercase, trim punctuation/whitespace at both ends, collapse
/// internal whitespace runs to one space.
std::string normalize_answer(std::string_view text);

/// Answer letter after the last "The answer is" marker (case-insensitive,
/// markdown emphasis and brackets tolerated), else a response consisting of
/// a single letter, else out of format. Never returns a letter outside
/// `letters`.
Extracted extract_mcq(std::string_view response, std::span<const std::string> letters);

Extracted extract_short_answer(std::string_view response);

/// Full trimmed response for ordinary settings. For gradual-instruction
/// settings: the text after the last marker, else the last non-empty line
/// with any "5." step number removed.
Extracted extract_translation(std::string_view response, const XiclSetting& setting);

/// Removes every block delimited by open/close markers (reasoning traces).
/// An unclosed open marker drops the rest of the text.
std::string strip_reasoning(std::string_view text, std::string_view open = "<think>",
                            std::string_view close = "</think>");

struct OutOfFormatSummary {
  double ratio = 0.0;
  std::size_t flagged = 0;
  std::size_t total = 0;
  bool empty_input = false;
};

/// Fraction of flagged records; 0 with empty_input set when there are none.
OutOfFormatSummary out_of_format_ratio(std::span<const bool> flags);

}  // namespace csicl
