#include "csicl/codeswitch/mix_ratio.hpp"

#include <stdexcept>

#include "csicl/util/text.hpp"
#include "csicl/util/unicode.hpp"

namespace csicl {

using unicode::Script;

bool can_discriminate(const LanguageTag& a, const LanguageTag& b) noexcept {
  if (a.script != b.script && a.script != Script::other && b.script != Script::other) return true;
  return stopwords(a.code) != nullptr && stopwords(b.code) != nullptr;
}

TokenLabel classify_token(std::string_view token, const LanguageTag& a, const LanguageTag& b) {
  if (a.script != b.script) {
    std::size_t in_a = 0, in_b = 0;
    for (char32_t cp : unicode::decode(token)) {
      const Script s = unicode::script_of(cp);
      if (s == a.script) ++in_a;
      else if (s == b.script) ++in_b;
    }
    if (in_a > in_b) return TokenLabel::lang_a;
    if (in_b > in_a) return TokenLabel::lang_b;
    return TokenLabel::unclassified;
  }
  const auto* lex_a = stopwords(a.code);
  const auto* lex_b = stopwords(b.code);
  if (!lex_a || !lex_b) return TokenLabel::unclassified;
  const std::string word = unicode::trim_punct_space(unicode::to_lower(unicode::nfkc(token)));
  if (word.empty()) return TokenLabel::unclassified;
  const bool is_a = lex_a->count(word) > 0;
  const bool is_b = lex_b->count(word) > 0;
  if (is_a && !is_b) return TokenLabel::lang_a;
  if (is_b && !is_a) return TokenLabel::lang_b;
  return TokenLabel::unclassified;
}

MixRatio estimate_mix_ratio(std::string_view text, const LanguageTag& a, const LanguageTag& b) {
  if (!can_discriminate(a, b))
    throw std::invalid_argument("no classifier can separate " + a.code + " from " + b.code +
                                " (same script and no stopword lexicon)");
  MixRatio r;
  for (const auto& tok : split_whitespace(text)) {
    ++r.tokens;
    switch (classify_token(tok, a, b)) {
      case TokenLabel::lang_a:
        ++r.classified;
        break;
      case TokenLabel::lang_b:
        ++r.classified;
        ++r.b_count;
        break;
      case TokenLabel::unclassified:
        break;
    }
  }
  if (r.classified == 0) {
    r.no_signal = true;
    return r;
  }
  r.fraction = static_cast<double>(r.b_count) / static_cast<double>(r.classified);
  return r;
}

}  // namespace csicl
