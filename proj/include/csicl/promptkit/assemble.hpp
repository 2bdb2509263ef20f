#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "csicl/codeswitch/ladder.hpp"
#include "csicl/corpus/corpus.hpp"
#include "csicl/promptkit/setting.hpp"
#include "csicl/promptkit/templates.hpp"

namespace csicl {

inline constexpr std::string_view kCsiclOpening =
    "Let's gradually translate this non-English query into English, then think in English, and finally answer the "
    "question.";

struct Message {
  std::string role;  // "user" or "assistant"
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

/// One demonstration with everything any setting may need. `target` is the
/// demo sample in the target language; `english` its parallel counterpart.
struct DemoShot {
  Sample target;
  std::optional<Sample> english;
  std::optional<CodeSwitchLadder> ladder_tgt_to_en;
  std::optional<CodeSwitchLadder> ladder_en_to_tgt;
  /// Code-switched question with the target language as matrix language.
  std::optional<std::string> cs_matrix_tgt;
  /// Code-switched question with English as matrix language.
  std::optional<std::string> cs_matrix_en;
  std::vector<std::string> paraphrases_en;
  std::vector<std::string> paraphrases_tgt;
};

struct PromptBundle {
  std::string system;
  std::vector<Message> messages;
  std::string query;
  std::string model_id;
  double temperature = 0.0;
  std::string digest;

  /// Demonstration turns followed by the query as a user turn.
  std::vector<Message> conversation() const;
};

/// SHA-256 over a canonical encoding of every bundle field except the digest.
std::string bundle_digest(const PromptBundle& bundle);

nlohmann::json to_json(const PromptBundle& bundle);

struct SystemPromptVars {
  /// Language of the evaluated query.
  LanguageTag query_lang;
  /// Language of the demonstrations.
  LanguageTag target_lang;
  /// Destination of translate_cot:random; ignored elsewhere.
  std::optional<LanguageTag> random_dest;
};

std::string build_system_prompt(XiclSetting setting, TaskKind task, const SystemPromptVars& vars,
                                const PromptLibrary& prompts);

struct AssembleOptions {
  std::size_t k_shots = 5;
  std::size_t paraphrases_per_shot = 4;
  std::string model_id;
  double temperature = 0.0;
};

/// Question text as shown to the model: stem plus "A. ..." choice lines for mcq.
std::string format_question(const Sample& s);
std::string format_question(const Sample& s, std::string_view stem);

/// Throws std::invalid_argument on a demo count or ladder direction mismatch,
/// or when a shot lacks the material its setting needs.
PromptBundle assemble_prompt(XiclSetting setting, std::span<const DemoShot> demos, const Sample& query,
                             const LanguageTag& target_lang, std::span<const LanguageTag> rnd_pool,
                             std::uint64_t seed, const AssembleOptions& options, const PromptLibrary& prompts);

/// Uniform draw from pool minus exclude, keyed by (seed, query_id).
LanguageTag pick_random_language(std::span<const LanguageTag> pool, std::span<const LanguageTag> exclude,
                                 std::uint64_t seed, std::string_view query_id);

}  // namespace csicl
