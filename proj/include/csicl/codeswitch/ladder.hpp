#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csicl/corpus/corpus.hpp"
#include "csicl/promptkit/setting.hpp"
#include "csicl/promptkit/templates.hpp"
#include "csicl/util/json_store.hpp"

namespace csicl {

inline constexpr std::size_t kLadderSteps = 5;

/// Fraction of the destination language at each ladder step.
inline constexpr std::array<double, kLadderSteps> kLadderTargets{0.0, 0.25, 0.5, 0.75, 1.0};

struct CsSentence {
  std::string text;
  LanguageTag matrix_lang;
  LanguageTag embedded_lang;
  double embedded_fraction = 0.0;
};

struct CodeSwitchLadder {
  std::array<std::string, kLadderSteps> steps;
  Direction direction = Direction::tgt_to_en;
  std::array<double, kLadderSteps> measured{};
  LanguageTag source_lang;
  LanguageTag dest_lang;
};

struct GenerationPolicy {
  int max_attempts = 3;
  double step_tolerance = 0.15;
  double purity_tolerance = 0.05;

  /// Throws std::invalid_argument unless max_attempts >= 1 and both
  /// tolerances lie in (0, 0.5).
  void validate() const;
};

enum class GenerationTask { code_switch, ladder, paraphrase };

/// Everything a generator may use. Model-backed generators read only
/// `system` and `user`; the offline fallback works from the structured fields.
struct GenerationRequest {
  GenerationTask task = GenerationTask::code_switch;
  std::string system;
  std::string user;
  ParallelPair pair;
  LanguageTag matrix;
  Direction direction = Direction::tgt_to_en;
  std::string code_switched;
  LanguageTag paraphrase_lang;
  std::string paraphrase_source;
  std::size_t paraphrase_count = 4;
};

/// Text-completion capability used to build demonstrations.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  /// Stable identity; part of every ladder cache key.
  virtual std::string id() const = 0;
  /// Throws GeneratorError on a hard failure (unreachable, auth).
  virtual std::string generate(const GenerationRequest& request) = 0;
};

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reply could not be split into the expected numbered lines.
class LadderParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic offline generator: splices a prefix of destination-language
/// words onto a suffix of source-language words, choosing the split whose
/// measured mix is closest to each target fraction. Not MLF-faithful; meant
/// for tests and network-free runs.
class FallbackGenerator final : public TextGenerator {
 public:
  std::string id() const override { return "fallback-splice-v1"; }
  std::string generate(const GenerationRequest& request) override;
};

/// Splice used by FallbackGenerator, exposed for tests.
std::string splice_toward(std::string_view from_text, const LanguageTag& from_lang, std::string_view to_text,
                          const LanguageTag& to_lang, double to_fraction);

/// Extracts exactly `count` lines numbered 1..count ("1." or "1)"). Other
/// non-empty lines are ignored. Throws LadderParseError otherwise.
std::vector<std::string> parse_numbered_lines(std::string_view reply, std::size_t count);

/// One code-switched sentence with the given matrix language.
CsSentence generate_cs(const ParallelPair& pair, const LanguageTag& matrix, TextGenerator& generator,
                       const PromptLibrary& prompts);

CodeSwitchLadder generate_ladder(const ParallelPair& pair, const CsSentence& cs, Direction direction,
                                 TextGenerator& generator, const PromptLibrary& prompts);

/// Measures every step as the fraction of the ladder's destination language.
std::array<double, kLadderSteps> measure_ladder(const std::array<std::string, kLadderSteps>& steps,
                                                const LanguageTag& source, const LanguageTag& dest);

struct LadderCheck {
  bool monotone = false;
  bool within_band = false;
  bool endpoints_pure = false;
  double max_deviation = 0.0;

  bool accepted() const noexcept { return monotone && within_band && endpoints_pure; }
};

LadderCheck check_ladder(const std::array<double, kLadderSteps>& measured, const GenerationPolicy& policy);

struct LadderOutcome {
  CodeSwitchLadder ladder;
  CsSentence cs;
  int attempts = 0;
  bool valid = false;
  std::vector<std::string> failures;
};

/// Generates code-switched sentence and ladder until the ladder passes
/// check_ladder or attempts run out. On exhaustion returns the attempt with
/// the smallest deviation, flagged invalid. Throws LadderParseError when no
/// attempt produced a parseable ladder; GeneratorError propagates.
LadderOutcome validate_and_regenerate(const ParallelPair& pair, Direction direction, const GenerationPolicy& policy,
                                      TextGenerator& generator, const PromptLibrary& prompts);

/// `count` same-language paraphrases of `text`.
std::vector<std::string> generate_paraphrases(std::string_view text, const LanguageTag& lang, std::size_t count,
                                              TextGenerator& generator, const PromptLibrary& prompts);

nlohmann::json to_json(const LadderOutcome& outcome);
LadderOutcome ladder_outcome_from_json(const nlohmann::json& j);

/// On-disk cache of validated ladders and paraphrases under
/// <cache_dir>/ladders and <cache_dir>/paraphrases. Keys hash the pair
/// texts, direction, generator id and policy.
class DemoCache {
 public:
  explicit DemoCache(const std::filesystem::path& cache_dir);

  static std::string ladder_digest(const ParallelPair& pair, Direction direction, const std::string& generator_id,
                                   const GenerationPolicy& policy);

  struct LadderResult {
    LadderOutcome outcome;
    std::string digest;
    bool from_cache = false;
  };

  LadderResult ladder(const ParallelPair& pair, Direction direction, const GenerationPolicy& policy,
                      TextGenerator& generator, const PromptLibrary& prompts);

  /// Cached lookup only; nullopt when absent.
  std::optional<LadderOutcome> find_ladder(const ParallelPair& pair, Direction direction,
                                           const std::string& generator_id, const GenerationPolicy& policy) const;

  struct ParaphraseResult {
    std::vector<std::string> paraphrases;
    std::string digest;
    bool from_cache = false;
  };

  ParaphraseResult paraphrases(const std::string& text, const LanguageTag& lang, std::size_t count,
                               TextGenerator& generator, const PromptLibrary& prompts);
  std::optional<std::vector<std::string>> find_paraphrases(const std::string& text, const LanguageTag& lang,
                                                           std::size_t count, const std::string& generator_id) const;

 private:
  static std::string paraphrase_digest(const std::string& text, const LanguageTag& lang, std::size_t count,
                                       const std::string& generator_id);
  JsonStore ladders_;
  JsonStore paraphrases_;
};

}  // namespace csicl
