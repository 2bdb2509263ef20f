#pragma once

#include <cstddef>
#include <string_view>
#include <unordered_set>
#include <string>

#include "csicl/corpus/language.hpp"

namespace csicl {

enum class TokenLabel { lang_a, lang_b, unclassified };

struct MixRatio {
  /// b_count / classified, or 0 when nothing was classified.
  double fraction = 0.0;
  std::size_t b_count = 0;
  std::size_t classified = 0;
  std::size_t tokens = 0;
  /// Set when no token carried a language signal.
  bool no_signal = false;
};

/// Function-word lexicon for a Latin-script language, or nullptr.
/// Entries are NFKC-normalized and lowercased.
const std::unordered_set<std::string>* stopwords(std::string_view code) noexcept;

/// True when tokens of a and b can be told apart: distinct scripts, or a
/// lexicon for both.
bool can_discriminate(const LanguageTag& a, const LanguageTag& b) noexcept;

/// Labels one whitespace token. Distinct-script pairs vote by code-point
/// script (ties and script-less tokens are unclassified); same-script pairs
/// fall back to the stopword lexicons, and a word in both or neither lexicon
/// is unclassified.
TokenLabel classify_token(std::string_view token, const LanguageTag& a, const LanguageTag& b);

/// Fraction of classified whitespace tokens attributed to `b`.
/// Throws std::invalid_argument when the pair cannot be discriminated.
MixRatio estimate_mix_ratio(std::string_view text, const LanguageTag& a, const LanguageTag& b);

}  // namespace csicl
