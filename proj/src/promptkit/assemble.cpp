#include "csicl/promptkit/assemble.hpp"

#include <algorithm>
#include <stdexcept>

#include "csicl/extraction/extraction.hpp"
#include "csicl/util/digest.hpp"
#include "csicl/util/rng.hpp"

namespace csicl {

using nlohmann::json;

std::vector<Message> PromptBundle::conversation() const {
  std::vector<Message> out = messages;
  out.push_back({"user", query});
  return out;
}

json to_json(const PromptBundle& b) {
  json msgs = json::array();
  for (const auto& m : b.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"system", b.system}, {"messages", msgs},          {"query", b.query},
          {"model_id", b.model_id}, {"temperature", b.temperature}, {"digest", b.digest}};
}

std::string bundle_digest(const PromptBundle& b) {
  json j = to_json(b);
  j.erase("digest");
  return sha256_hex(j.dump());
}

namespace {

std::string_view task_suffix(TaskKind task) { return to_string(task); }

std::string opening_for(Direction d, const LanguageTag& target) {
  if (d == Direction::tgt_to_en) return std::string(kCsiclOpening);
  return "Let's gradually translate this English query into " + target.name + ", then think in " + target.name +
         ", and finally answer the question.";
}

}  // namespace

std::string build_system_prompt(XiclSetting setting, TaskKind task, const SystemPromptVars& vars,
                                const PromptLibrary& prompts) {
  const std::string suffix(task_suffix(task));
  if (setting.uses_gradual_instruction()) {
    const Direction d = setting.kind() == SettingKind::zero_shot_gradual ? Direction::tgt_to_en : setting.direction();
    const bool to_en = d == Direction::tgt_to_en;
    return prompts.render("system/csicl." + suffix,
                          {{"source_descriptor", to_en ? "non-English" : "English"},
                           {"dest_language", to_en ? "English" : vars.target_lang.name},
                           {"opening", opening_for(d, vars.target_lang)}});
  }
  if (setting.kind() == SettingKind::translate_cot) {
    std::string dest = "English";
    if (setting.dest() == TranslateDest::random) {
      if (!vars.random_dest) throw std::invalid_argument("translate_cot:random needs a drawn destination language");
      dest = vars.random_dest->name;
    }
    return prompts.render("system/translate." + suffix,
                          {{"source_language", vars.query_lang.name}, {"dest_language", dest}});
  }
  return prompts.render("system/eval." + suffix, {{"source_language", vars.query_lang.name}});
}

std::string format_question(const Sample& s) { return format_question(s, s.question); }

std::string format_question(const Sample& s, std::string_view stem) {
  std::string out(stem);
  for (const auto& c : s.choices) out += "\n" + c.letter + ". " + c.text;
  return out;
}

namespace {

std::string answer_of(const Sample& s) {
  if (s.gold.empty()) throw std::invalid_argument("demo sample " + s.id + " has no gold answer");
  return s.gold.front();
}

std::string marked(const Sample& s) { return std::string(kAnswerMarker) + " " + answer_of(s); }

std::string numbered_steps(const CodeSwitchLadder& ladder) {
  std::string out;
  for (std::size_t i = 0; i < ladder.steps.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + ladder.steps[i];
  }
  return out;
}

const Sample& need_english(const DemoShot& shot) {
  if (!shot.english) throw std::invalid_argument("demo " + shot.target.id + " has no English counterpart");
  return *shot.english;
}

const CodeSwitchLadder& need_ladder(const DemoShot& shot, Direction d) {
  const auto& ladder = d == Direction::tgt_to_en ? shot.ladder_tgt_to_en : shot.ladder_en_to_tgt;
  if (!ladder)
    throw std::invalid_argument("demo " + shot.target.id + " has no " + std::string(to_string(d)) + " ladder");
  if (ladder->direction != d)
    throw std::invalid_argument("demo " + shot.target.id + ": ladder direction " +
                                std::string(to_string(ladder->direction)) + " does not match setting direction " +
                                std::string(to_string(d)));
  return *ladder;
}

// The sample whose text opens a ladder of direction d.
const Sample& ladder_source(const DemoShot& shot, Direction d) {
  return d == Direction::tgt_to_en ? shot.target : need_english(shot);
}

void add_shot(std::vector<Message>& out, std::string user, std::string assistant) {
  out.push_back({"user", std::move(user)});
  out.push_back({"assistant", std::move(assistant)});
}

}  // namespace

PromptBundle assemble_prompt(XiclSetting setting, std::span<const DemoShot> demos, const Sample& query,
                             const LanguageTag& target_lang, std::span<const LanguageTag> rnd_pool,
                             std::uint64_t seed, const AssembleOptions& options, const PromptLibrary& prompts) {
  const bool few_shot = setting.uses_demos();
  const std::size_t expected = few_shot ? options.k_shots : 0;
  if (demos.size() != expected)
    throw std::invalid_argument("setting " + setting.id() + " takes " + std::to_string(expected) +
                                " demonstrations, got " + std::to_string(demos.size()));

  SystemPromptVars vars{query.language, target_lang, std::nullopt};
  if (setting.kind() == SettingKind::translate_cot && setting.dest() == TranslateDest::random) {
    const std::vector<LanguageTag> exclude{query.language, english()};
    vars.random_dest = pick_random_language(rnd_pool, exclude, seed, query.language.code + ":" + query.id);
  }

  PromptBundle b;
  b.system = build_system_prompt(setting, query.task, vars, prompts);
  b.query = format_question(query);
  b.model_id = options.model_id;
  b.temperature = options.temperature;

  for (const auto& shot : demos) {
    if (shot.target.task != query.task)
      throw std::invalid_argument("demo " + shot.target.id + " task differs from query task");
    const Sample& tgt = shot.target;
    switch (setting.kind()) {
      case SettingKind::zero_shot:
      case SettingKind::zero_shot_gradual:
        break;
      case SettingKind::fewshot_mono: {
        const Sample& s = setting.side() == LangSide::en ? need_english(shot) : tgt;
        add_shot(b.messages, format_question(s), answer_of(s));
        break;
      }
      case SettingKind::fewshot_parallel:
        add_shot(b.messages, format_question(tgt) + "\n\n" + format_question(need_english(shot)), answer_of(tgt));
        break;
      case SettingKind::translate_cot:
        add_shot(b.messages, format_question(tgt) + "\n\n" + format_question(need_english(shot)), marked(tgt));
        break;
      case SettingKind::cs_fewshot: {
        const bool en_matrix = setting.side() == LangSide::en;
        const auto& cs = en_matrix ? shot.cs_matrix_en : shot.cs_matrix_tgt;
        if (!cs)
          throw std::invalid_argument("demo " + tgt.id + " has no code-switched sentence with " +
                                      (en_matrix ? std::string("English") : target_lang.name) + " as matrix");
        add_shot(b.messages, format_question(en_matrix ? need_english(shot) : tgt, *cs), answer_of(tgt));
        break;
      }
      case SettingKind::gradual_cs_fewshot:
      case SettingKind::csicl: {
        const Direction d = setting.direction();
        const CodeSwitchLadder& ladder = need_ladder(shot, d);
        std::string assistant = numbered_steps(ladder) + "\n\n" + marked(tgt);
        if (setting.kind() == SettingKind::csicl) assistant = opening_for(d, target_lang) + "\n\n" + assistant;
        add_shot(b.messages, format_question(ladder_source(shot, d)), std::move(assistant));
        break;
      }
      case SettingKind::paraphrase: {
        const bool en = setting.side() == LangSide::en;
        const Sample& s = en ? need_english(shot) : tgt;
        const auto& list = en ? shot.paraphrases_en : shot.paraphrases_tgt;
        if (list.size() != options.paraphrases_per_shot)
          throw std::invalid_argument("demo " + tgt.id + " has " + std::to_string(list.size()) +
                                      " paraphrases, expected " + std::to_string(options.paraphrases_per_shot));
        std::string stem = s.question;
        for (const auto& p : list) stem += "\n" + p;
        add_shot(b.messages, format_question(s, stem), answer_of(s));
        break;
      }
    }
  }
  b.digest = bundle_digest(b);
  return b;
}

LanguageTag pick_random_language(std::span<const LanguageTag> pool, std::span<const LanguageTag> exclude,
                                 std::uint64_t seed, std::string_view query_id) {
  std::vector<LanguageTag> candidates;
  for (const auto& l : pool)
    if (std::find(exclude.begin(), exclude.end(), l) == exclude.end() &&
        std::find(candidates.begin(), candidates.end(), l) == candidates.end())
      candidates.push_back(l);
  if (candidates.empty()) throw std::invalid_argument("pick_random_language: no candidate language left");
  std::sort(candidates.begin(), candidates.end());
  SplitMix64 rng(derive_seed(seed, {"random_language", query_id}));
  return candidates[rng.below(candidates.size())];
}

}  // namespace csicl
