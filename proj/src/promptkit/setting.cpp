#include "csicl/promptkit/setting.hpp"

#include <stdexcept>

#include "csicl/util/text.hpp"

namespace csicl {

std::string_view to_string(Direction d) noexcept { return d == Direction::tgt_to_en ? "tgt_to_en" : "en_to_tgt"; }

Direction parse_direction(std::string_view s) {
  if (s == "tgt_to_en") return Direction::tgt_to_en;
  if (s == "en_to_tgt") return Direction::en_to_tgt;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

namespace {
std::string_view side_name(LangSide s) { return s == LangSide::en ? "en" : "tgt"; }
LangSide parse_side(std::string_view s) {
  if (s == "en") return LangSide::en;
  if (s == "tgt") return LangSide::tgt;
  throw std::invalid_argument("expected 'en' or 'tgt', got '" + std::string(s) + "'");
}
std::string_view side_label(LangSide s) { return s == LangSide::en ? "En" : "Tgt."; }
std::string_view direction_label(Direction d) { return d == Direction::tgt_to_en ? "Tgt.→En" : "En→Tgt."; }
}  // namespace

XiclSetting XiclSetting::zero_shot() { return XiclSetting(SettingKind::zero_shot); }

XiclSetting XiclSetting::fewshot_mono(LangSide lang) {
  XiclSetting s(SettingKind::fewshot_mono);
  s.side_ = lang;
  return s;
}

XiclSetting XiclSetting::fewshot_parallel() { return XiclSetting(SettingKind::fewshot_parallel); }

XiclSetting XiclSetting::translate_cot(TranslateDest dest, bool with_demos) {
  XiclSetting s(SettingKind::translate_cot);
  s.dest_ = dest;
  s.with_demos_ = with_demos;
  return s;
}

XiclSetting XiclSetting::cs_fewshot(LangSide matrix) {
  XiclSetting s(SettingKind::cs_fewshot);
  s.side_ = matrix;
  return s;
}

XiclSetting XiclSetting::gradual_cs_fewshot(Direction direction) {
  XiclSetting s(SettingKind::gradual_cs_fewshot);
  s.direction_ = direction;
  return s;
}

XiclSetting XiclSetting::zero_shot_gradual() { return XiclSetting(SettingKind::zero_shot_gradual); }

XiclSetting XiclSetting::csicl(Direction direction) {
  XiclSetting s(SettingKind::csicl);
  s.direction_ = direction;
  return s;
}

XiclSetting XiclSetting::paraphrase(LangSide lang) {
  XiclSetting s(SettingKind::paraphrase);
  s.side_ = lang;
  return s;
}

XiclSetting XiclSetting::parse(std::string_view id) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = id.find(':', start);
    parts.emplace_back(id.substr(start, colon == std::string_view::npos ? id.npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const std::string& head = parts[0];
  auto expect = [&](std::size_t n) {
    if (parts.size() != n) throw std::invalid_argument("malformed setting id '" + std::string(id) + "'");
  };
  if (head == "zero_shot") return expect(1), zero_shot();
  if (head == "fewshot_parallel") return expect(1), fewshot_parallel();
  if (head == "zero_shot_gradual") return expect(1), zero_shot_gradual();
  if (head == "fewshot_mono") return expect(2), fewshot_mono(parse_side(parts[1]));
  if (head == "cs_fewshot") return expect(2), cs_fewshot(parse_side(parts[1]));
  if (head == "paraphrase") return expect(2), paraphrase(parse_side(parts[1]));
  if (head == "gradual_cs_fewshot") return expect(2), gradual_cs_fewshot(parse_direction(parts[1]));
  if (head == "csicl") return expect(2), csicl(parse_direction(parts[1]));
  if (head == "translate_cot") {
    if (parts.size() < 2 || parts.size() > 3) expect(2);
    TranslateDest dest;
    if (parts[1] == "en") dest = TranslateDest::en;
    else if (parts[1] == "random") dest = TranslateDest::random;
    else throw std::invalid_argument("translate_cot destination must be en or random");
    if (parts.size() == 3 && parts[2] != "nodemos") expect(2);
    return translate_cot(dest, parts.size() == 2);
  }
  throw std::invalid_argument("unknown setting '" + std::string(id) + "'");
}

std::string XiclSetting::id() const {
  switch (kind_) {
    case SettingKind::zero_shot: return "zero_shot";
    case SettingKind::fewshot_mono: return "fewshot_mono:" + std::string(side_name(side_));
    case SettingKind::fewshot_parallel: return "fewshot_parallel";
    case SettingKind::translate_cot:
      return std::string("translate_cot:") + (dest_ == TranslateDest::en ? "en" : "random") +
             (with_demos_ ? "" : ":nodemos");
    case SettingKind::cs_fewshot: return "cs_fewshot:" + std::string(side_name(side_));
    case SettingKind::gradual_cs_fewshot: return "gradual_cs_fewshot:" + std::string(to_string(direction_));
    case SettingKind::zero_shot_gradual: return "zero_shot_gradual";
    case SettingKind::csicl: return "csicl:" + std::string(to_string(direction_));
    case SettingKind::paraphrase: return "paraphrase:" + std::string(side_name(side_));
  }
  return "zero_shot";
}

std::string XiclSetting::label() const {
  switch (kind_) {
    case SettingKind::zero_shot: return "Zero-shot";
    case SettingKind::fewshot_mono: return "Monolingual (" + std::string(side_label(side_)) + ")";
    case SettingKind::fewshot_parallel: return "Parallel";
    case SettingKind::translate_cot:
      return std::string("Translation (Tgt.→") + (dest_ == TranslateDest::en ? "En" : "Rnd.") + ")" +
             (with_demos_ ? "" : " [no demos]");
    case SettingKind::cs_fewshot:
      return side_ == LangSide::en ? "CS (En+Tgt.)" : "CS (Tgt.+En)";
    case SettingKind::gradual_cs_fewshot: return "Gradual CS (" + std::string(direction_label(direction_)) + ")";
    case SettingKind::zero_shot_gradual: return "Gradual Translation (Tgt.→En)";
    case SettingKind::csicl: return "CSICL (" + std::string(direction_label(direction_)) + ")";
    case SettingKind::paraphrase: return "Paraphrasing (" + std::string(side_label(side_)) + ")";
  }
  return id();
}

bool XiclSetting::uses_demos() const noexcept {
  switch (kind_) {
    case SettingKind::zero_shot:
    case SettingKind::zero_shot_gradual:
      return false;
    case SettingKind::translate_cot:
      return with_demos_;
    default:
      return true;
  }
}

bool XiclSetting::uses_gradual_instruction() const noexcept {
  return kind_ == SettingKind::csicl || kind_ == SettingKind::zero_shot_gradual;
}

bool XiclSetting::needs_ladder(Direction d) const noexcept {
  switch (kind_) {
    case SettingKind::gradual_cs_fewshot:
    case SettingKind::csicl:
      return direction_ == d;
    // Code-switched shots reuse the intermediate sentence of the ladder whose
    // matrix language matches: target matrix for tgt_to_en, English for en_to_tgt.
    case SettingKind::cs_fewshot:
      return (side_ == LangSide::tgt) == (d == Direction::tgt_to_en);
    default:
      return false;
  }
}

std::vector<XiclSetting> main_settings() {
  return {
      XiclSetting::zero_shot(),
      XiclSetting::fewshot_mono(LangSide::en),
      XiclSetting::fewshot_mono(LangSide::tgt),
      XiclSetting::fewshot_parallel(),
      XiclSetting::translate_cot(TranslateDest::en),
      XiclSetting::translate_cot(TranslateDest::random),
      XiclSetting::cs_fewshot(LangSide::en),
      XiclSetting::cs_fewshot(LangSide::tgt),
      XiclSetting::gradual_cs_fewshot(Direction::en_to_tgt),
      XiclSetting::gradual_cs_fewshot(Direction::tgt_to_en),
      XiclSetting::zero_shot_gradual(),
      XiclSetting::csicl(Direction::en_to_tgt),
      XiclSetting::csicl(Direction::tgt_to_en),
  };
}

std::vector<XiclSetting> all_settings() {
  auto v = main_settings();
  v.push_back(XiclSetting::paraphrase(LangSide::en));
  v.push_back(XiclSetting::paraphrase(LangSide::tgt));
  return v;
}

}  // namespace csicl
