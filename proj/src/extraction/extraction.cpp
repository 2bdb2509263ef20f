#include "csicl/extraction/extraction.hpp"

#include <algorithm>
#include <stdexcept>

#include "csicl/util/text.hpp"
#include "csicl/util/unicode.hpp"

namespace csicl {

std::string_view to_string(ExtractMethod m) noexcept {
  switch (m) {
    case ExtractMethod::marker: return "marker";
    case ExtractMethod::bare_letter: return "bare_letter";
    case ExtractMethod::last_line: return "last_line";
    case ExtractMethod::whole_response: return "whole_response";
    case ExtractMethod::none: return "none";
  }
  return "none";
}

ExtractMethod parse_extract_method(std::string_view s) {
  for (auto m : {ExtractMethod::marker, ExtractMethod::bare_letter, ExtractMethod::last_line,
                 ExtractMethod::whole_response, ExtractMethod::none})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown extraction method '" + std::string(s) + "'");
}

namespace {

// Markdown emphasis and inline code markers; removed before marker search.
std::string strip_emphasis(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (c != '*' && c != '`') out.push_back(c);
  return out;
}

bool is_ascii_alnum(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

// Text following the last marker: the rest of its line, or the next
// non-empty line when the marker ends its line. nullopt when no marker.
std::optional<std::string> after_last_marker(std::string_view text) {
  const auto pos = rfind_icase(text, kAnswerMarker);
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = text.substr(pos + kAnswerMarker.size());
  const auto lines = split_lines(rest);
  std::string first = unicode::trim_punct_space(lines.front());
  if (!first.empty() || lines.size() == 1) return std::string(trim(lines.front()));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!trim(lines[i]).empty()) return std::string(trim(lines[i]));
  }
  return std::string();
}

std::string strip_step_number(std::string_view line) {
  line = trim(line);
  std::size_t i = 0;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) return std::string(trim(line.substr(i + 1)));
  return std::string(line);
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  const std::string lowered = unicode::to_lower(unicode::nfkc(text));
  const std::string trimmed = unicode::trim_punct_space(lowered);
  const std::u32string cps = unicode::decode(trimmed);
  std::u32string out;
  bool in_space = false;
  for (char32_t cp : cps) {
    if (unicode::is_space(cp)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(U' ');
    in_space = false;
    out.push_back(cp);
  }
  return unicode::encode(out);
}

Extracted extract_mcq(std::string_view response, std::span<const std::string> letters) {
  if (letters.empty()) throw std::invalid_argument("extract_mcq: empty letter set");
  const auto valid = [&](std::string_view l) { return std::find(letters.begin(), letters.end(), l) != letters.end(); };
  const std::string text = strip_emphasis(unicode::nfkc(response));

  if (const auto pos = rfind_icase(text, kAnswerMarker); pos != std::string::npos) {
    std::size_t i = pos + kAnswerMarker.size();
    while (i < text.size() && std::string_view(" \t\r\n:([{\"'").find(text[i]) != std::string_view::npos) ++i;
    // Curly quotes are three bytes in UTF-8.
    while (text.compare(i, 3, "“") == 0 || text.compare(i, 3, "‘") == 0) i += 3;
    if (i < text.size() && text[i] >= 'A' && text[i] <= 'Z' && (i + 1 == text.size() || !is_ascii_alnum(text[i + 1]))) {
      const std::string letter(1, text[i]);
      if (valid(letter)) return Extracted::found(letter, ExtractMethod::marker);
    }
  }

  const std::string bare = unicode::trim_punct_space(text);
  if (valid(bare)) return Extracted::found(bare, ExtractMethod::bare_letter);
  return Extracted::none();
}

Extracted extract_short_answer(std::string_view response) {
  const std::string text = strip_emphasis(response);
  if (auto after = after_last_marker(text)) {
    std::string value = normalize_answer(*after);
    if (value.empty()) return Extracted::none();
    return Extracted::found(std::move(value), ExtractMethod::marker);
  }
  std::string value = normalize_answer(text);
  if (value.empty()) return Extracted::none();
  return Extracted::found(std::move(value), ExtractMethod::whole_response);
}

Extracted extract_translation(std::string_view response, const XiclSetting& setting) {
  if (!setting.uses_gradual_instruction()) {
    std::string value(trim(response));
    if (unicode::trim_punct_space(value).empty()) return Extracted::none();
    return Extracted::found(std::move(value), ExtractMethod::whole_response);
  }
  const std::string text = strip_emphasis(response);
  if (auto after = after_last_marker(text)) {
    std::string value(trim(*after));
    if (!value.empty() && value.front() == ':') value = std::string(trim(std::string_view(value).substr(1)));
    if (unicode::trim_punct_space(value).empty()) return Extracted::none();
    return Extracted::found(std::move(value), ExtractMethod::marker);
  }
  const auto lines = split_lines(text);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (trim(*it).empty()) continue;
    std::string value = strip_step_number(*it);
    if (unicode::trim_punct_space(value).empty()) return Extracted::none();
    return Extracted::found(std::move(value), ExtractMethod::last_line);
  }
  return Extracted::none();
}

std::string strip_reasoning(std::string_view text, std::string_view open, std::string_view close) {
  if (open.empty() || close.empty()) return std::string(text);
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto b = text.find(open, pos);
    if (b == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, b - pos));
    const auto e = text.find(close, b + open.size());
    if (e == std::string_view::npos) break;
    pos = e + close.size();
  }
  return out;
}

OutOfFormatSummary out_of_format_ratio(std::span<const bool> flags) {
  OutOfFormatSummary s;
  s.total = flags.size();
  s.flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  if (s.total == 0) {
    s.empty_input = true;
    return s;
  }
  s.ratio = static_cast<double>(s.flagged) / static_cast<double>(s.total);
  return s;
}

}  // namespace csicl
