#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "csicl/util/unicode.hpp"

namespace csicl {

enum class ResourceTier { high, mid, low };

std::string_view to_string(ResourceTier tier) noexcept;

/// A configured language: ISO-639 code, display name, resource tier and
/// dominant script.
struct LanguageTag {
  std::string code;
  std::string name;
  ResourceTier tier = ResourceTier::high;
  unicode::Script script = unicode::Script::latin;

  friend bool operator==(const LanguageTag& a, const LanguageTag& b) { return a.code == b.code; }
  friend auto operator<=>(const LanguageTag& a, const LanguageTag& b) { return a.code <=> b.code; }
};

/// Looks up a built-in language by code. Throws std::invalid_argument for
/// codes outside the registry.
const LanguageTag& language(std::string_view code);

const LanguageTag& english();

bool is_known_language(std::string_view code) noexcept;

/// All registered languages, sorted by code.
const std::vector<LanguageTag>& known_languages();

}  // namespace csicl
