#include "csicl/corpus/language.hpp"

#include <algorithm>
#include <stdexcept>

namespace csicl {

using unicode::Script;

std::string_view to_string(ResourceTier tier) noexcept {
  switch (tier) {
    case ResourceTier::high:
      return "high";
    case ResourceTier::mid:
      return "mid";
    case ResourceTier::low:
      return "low";
  }
  return "high";
}

const std::vector<LanguageTag>& known_languages() {
  // Tiers follow the Global MMLU evaluation roster; ja/nl/de/ar cover the
  // task-ablation unseen languages and common extras.
  static const std::vector<LanguageTag> kLanguages = [] {
    std::vector<LanguageTag> v{
        {"ar", "Arabic", ResourceTier::high, Script::arabic},
        {"de", "German", ResourceTier::high, Script::latin},
        {"en", "English", ResourceTier::high, Script::latin},
        {"es", "Spanish", ResourceTier::high, Script::latin},
        {"fr", "French", ResourceTier::high, Script::latin},
        {"id", "Indonesian", ResourceTier::mid, Script::latin},
        {"ja", "Japanese", ResourceTier::high, Script::han},
        {"ko", "Korean", ResourceTier::mid, Script::hangul},
        {"nl", "Dutch", ResourceTier::high, Script::latin},
        {"sw", "Swahili", ResourceTier::low, Script::latin},
        {"te", "Telugu", ResourceTier::low, Script::telugu},
        {"tr", "Turkish", ResourceTier::mid, Script::latin},
        {"yo", "Yoruba", ResourceTier::low, Script::latin},
        {"zh", "Chinese", ResourceTier::high, Script::han},
    };
    std::sort(v.begin(), v.end());
    return v;
  }();
  return kLanguages;
}

bool is_known_language(std::string_view code) noexcept {
  const auto& langs = known_languages();
  return std::any_of(langs.begin(), langs.end(), [&](const LanguageTag& l) { return l.code == code; });
}

const LanguageTag& language(std::string_view code) {
  for (const auto& l : known_languages())
    if (l.code == code) return l;
  throw std::invalid_argument("unknown language code '" + std::string(code) + "'");
}

const LanguageTag& english() {
  static const LanguageTag& en = language("en");
  return en;
}

}  // namespace csicl
