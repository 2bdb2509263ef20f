#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace csicl {

enum class Direction { tgt_to_en, en_to_tgt };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view s);

/// Which language a monolingual / code-switched / paraphrase shot uses.
enum class LangSide { en, tgt };

enum class TranslateDest { en, random };

enum class SettingKind {
  zero_shot,
  fewshot_mono,
  fewshot_parallel,
  translate_cot,
  cs_fewshot,
  gradual_cs_fewshot,
  zero_shot_gradual,
  csicl,
  paraphrase,
};

/// One cross-lingual prompting strategy. Built only through the named
/// factories or parse(), so parameters that do not apply to a kind are
/// always at their defaults and equality is structural.
class XiclSetting {
 public:
  static XiclSetting zero_shot();
  static XiclSetting fewshot_mono(LangSide lang);
  static XiclSetting fewshot_parallel();
  static XiclSetting translate_cot(TranslateDest dest, bool with_demos = true);
  /// `matrix` is the grammatically dominant language of the code-switched shots.
  static XiclSetting cs_fewshot(LangSide matrix);
  static XiclSetting gradual_cs_fewshot(Direction direction);
  static XiclSetting zero_shot_gradual();
  static XiclSetting csicl(Direction direction);
  static XiclSetting paraphrase(LangSide lang);

  /// Inverse of id(), e.g. "csicl:tgt_to_en", "translate_cot:random:nodemos".
  static XiclSetting parse(std::string_view id);

  SettingKind kind() const noexcept { return kind_; }
  LangSide side() const noexcept { return side_; }
  Direction direction() const noexcept { return direction_; }
  TranslateDest dest() const noexcept { return dest_; }
  bool with_demos() const noexcept { return with_demos_; }

  std::string id() const;
  /// Table label, e.g. "Gradual CS (Tgt.→En)".
  std::string label() const;

  bool uses_demos() const noexcept;
  /// Settings whose system prompt is the gradual-translation instruction.
  bool uses_gradual_instruction() const noexcept;
  bool needs_ladder(Direction d) const noexcept;

  friend bool operator==(const XiclSetting& a, const XiclSetting& b) { return a.id() == b.id(); }
  friend std::strong_ordering operator<=>(const XiclSetting& a, const XiclSetting& b) { return a.id() <=> b.id(); }

 private:
  explicit XiclSetting(SettingKind kind) : kind_(kind) {}

  SettingKind kind_;
  LangSide side_ = LangSide::tgt;
  Direction direction_ = Direction::tgt_to_en;
  TranslateDest dest_ = TranslateDest::en;
  bool with_demos_ = true;
};

/// Zero-shot, the five baselines, the six ablations and CSICL (Tgt.→En),
/// in table order.
std::vector<XiclSetting> main_settings();

/// main_settings() followed by the two paraphrase controls.
std::vector<XiclSetting> all_settings();

}  // namespace csicl
