#include "csicl/codeswitch/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csicl/codeswitch/mix_ratio.hpp"
#include "csicl/util/digest.hpp"
#include "csicl/util/text.hpp"

namespace csicl {

using nlohmann::json;

void GenerationPolicy::validate() const {
  if (max_attempts < 1) throw std::invalid_argument("generation policy: max_attempts must be >= 1");
  auto in_range = [](double t) { return t > 0.0 && t < 0.5; };
  if (!in_range(step_tolerance)) throw std::invalid_argument("generation policy: step_tolerance must be in (0, 0.5)");
  if (!in_range(purity_tolerance))
    throw std::invalid_argument("generation policy: purity_tolerance must be in (0, 0.5)");
}

std::vector<std::string> parse_numbered_lines(std::string_view reply, std::size_t count) {
  std::vector<std::string> out;
  for (const auto& raw : split_lines(reply)) {
    const std::string_view line = trim(raw);
    std::size_t i = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
    if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) continue;
    const auto number = std::stoul(std::string(line.substr(0, i)));
    if (number != out.size() + 1)
      throw LadderParseError("numbered line " + std::to_string(number) + " out of sequence (expected " +
                             std::to_string(out.size() + 1) + ")");
    const std::string_view text = trim(line.substr(i + 1));
    if (text.empty()) throw LadderParseError("numbered line " + std::to_string(number) + " is empty");
    out.emplace_back(text);
  }
  if (out.size() != count)
    throw LadderParseError("expected " + std::to_string(count) + " numbered lines, got " + std::to_string(out.size()));
  return out;
}

namespace {

double measure(std::string_view text, const LanguageTag& from, const LanguageTag& to) {
  return estimate_mix_ratio(text, from, to).fraction;
}

std::string numbered(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += std::to_string(i + 1) + ". " + lines[i];
    if (i + 1 < lines.size()) out += '\n';
  }
  return out;
}

}  // namespace

std::string splice_toward(std::string_view from_text, const LanguageTag& from_lang, std::string_view to_text,
                          const LanguageTag& to_lang, double to_fraction) {
  if (to_fraction <= 0.0) return std::string(from_text);
  if (to_fraction >= 1.0) return std::string(to_text);
  const auto from = split_whitespace(from_text);
  const auto to = split_whitespace(to_text);

  std::string best;
  double best_cost = std::numeric_limits<double>::infinity();
  double best_shape = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= to.size(); ++k) {
    for (std::size_t s = 0; s <= from.size(); ++s) {
      if (k + s == 0) continue;
      std::vector<std::string> words(to.begin(), to.begin() + static_cast<std::ptrdiff_t>(k));
      words.insert(words.end(), from.end() - static_cast<std::ptrdiff_t>(s), from.end());
      std::string candidate = join(words, " ");
      const MixRatio r = estimate_mix_ratio(candidate, from_lang, to_lang);
      if (r.no_signal) continue;
      const double cost = std::abs(r.fraction - to_fraction);
      // Prefer splits that keep proportional amounts of both sentences.
      const double shape = std::abs(static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(to.size(), 1)) - to_fraction) +
                           std::abs(static_cast<double>(s) / static_cast<double>(std::max<std::size_t>(from.size(), 1)) -
                                    (1.0 - to_fraction));
      if (cost < best_cost - 1e-12 || (std::abs(cost - best_cost) <= 1e-12 && shape < best_shape - 1e-12)) {
        best_cost = cost;
        best_shape = shape;
        best = std::move(candidate);
      }
    }
  }
  return best.empty() ? std::string(from_text) : best;
}

std::string FallbackGenerator::generate(const GenerationRequest& req) {
  const auto& en = english();
  switch (req.task) {
    case GenerationTask::code_switch:
      if (req.matrix == en) return splice_toward(req.pair.english_text, en, req.pair.source_text, req.pair.source_lang, 0.5);
      return splice_toward(req.pair.source_text, req.pair.source_lang, req.pair.english_text, en, 0.5);
    case GenerationTask::ladder: {
      const bool to_english = req.direction == Direction::tgt_to_en;
      const std::string& from = to_english ? req.pair.source_text : req.pair.english_text;
      const std::string& to = to_english ? req.pair.english_text : req.pair.source_text;
      const LanguageTag& from_lang = to_english ? req.pair.source_lang : en;
      const LanguageTag& to_lang = to_english ? en : req.pair.source_lang;
      std::vector<std::string> steps;
      for (double f : kLadderTargets) steps.push_back(splice_toward(from, from_lang, to, to_lang, f));
      return "Output:\n" + numbered(steps);
    }
    case GenerationTask::paraphrase: {
      // Word rotations: same language, same words, different surface form.
      const auto words = split_whitespace(req.paraphrase_source);
      std::vector<std::string> lines;
      for (std::size_t i = 1; i <= req.paraphrase_count; ++i) {
        if (words.size() < 2) {
          lines.push_back(req.paraphrase_source);
          continue;
        }
        std::vector<std::string> rotated(words);
        std::rotate(rotated.begin(), rotated.begin() + static_cast<std::ptrdiff_t>(i % words.size()), rotated.end());
        lines.push_back(join(rotated, " "));
      }
      return numbered(lines);
    }
  }
  throw GeneratorError("fallback generator: unknown task");
}

CsSentence generate_cs(const ParallelPair& pair, const LanguageTag& matrix, TextGenerator& generator,
                       const PromptLibrary& prompts) {
  pair.validate();
  const auto& en = english();
  if (matrix != pair.source_lang && matrix != en)
    throw std::invalid_argument("generate_cs: matrix language " + matrix.code + " is not part of pair " + pair.id);
  const LanguageTag& embedded = matrix == en ? pair.source_lang : en;
  if (matrix == embedded) throw std::invalid_argument("generate_cs: matrix and embedded language are both " + matrix.code);

  GenerationRequest req;
  req.task = GenerationTask::code_switch;
  req.system = prompts.render(matrix == en ? "codeswitch/cs_matrix_english" : "codeswitch/cs_matrix_source",
                              {{"language", pair.source_lang.name}});
  req.user = prompts.render("codeswitch/cs_input", {{"english", pair.english_text},
                                                    {"language", pair.source_lang.name},
                                                    {"source", pair.source_text}});
  req.pair = pair;
  req.matrix = matrix;
  std::string text(trim(generator.generate(req)));
  // Models sometimes echo the tag.
  if (text.rfind("<Code-Switching>", 0) == 0) text = std::string(trim(std::string_view(text).substr(16)));
  if (text.empty()) throw GeneratorError("generator " + generator.id() + " returned an empty code-switched sentence");
  CsSentence cs{text, matrix, embedded, 0.0};
  cs.embedded_fraction = measure(text, matrix, embedded);
  return cs;
}

std::array<double, kLadderSteps> measure_ladder(const std::array<std::string, kLadderSteps>& steps,
                                                const LanguageTag& source, const LanguageTag& dest) {
  std::array<double, kLadderSteps> out{};
  for (std::size_t i = 0; i < kLadderSteps; ++i) out[i] = measure(steps[i], source, dest);
  return out;
}

CodeSwitchLadder generate_ladder(const ParallelPair& pair, const CsSentence& cs, Direction direction,
                                 TextGenerator& generator, const PromptLibrary& prompts) {
  const auto& en = english();
  if (pair.source_lang == en)
    throw std::invalid_argument("generate_ladder: pair " + pair.id + " has an English source; no " +
                                std::string(to_string(direction)) + " ladder exists");
  pair.validate();
  const bool to_english = direction == Direction::tgt_to_en;

  GenerationRequest req;
  req.task = GenerationTask::ladder;
  req.system = prompts.render(to_english ? "codeswitch/ladder_to_english" : "codeswitch/ladder_from_english",
                              {{"language", pair.source_lang.name}});
  req.user = prompts.render(to_english ? "codeswitch/ladder_input_to_english" : "codeswitch/ladder_input_from_english",
                            {{"english", pair.english_text},
                             {"language", pair.source_lang.name},
                             {"source", pair.source_text},
                             {"code_switched", cs.text}});
  req.pair = pair;
  req.matrix = cs.matrix_lang;
  req.direction = direction;
  req.code_switched = cs.text;
  const std::string reply = generator.generate(req);
  const auto lines = parse_numbered_lines(reply, kLadderSteps);

  CodeSwitchLadder ladder;
  std::copy(lines.begin(), lines.end(), ladder.steps.begin());
  ladder.direction = direction;
  ladder.source_lang = to_english ? pair.source_lang : en;
  ladder.dest_lang = to_english ? en : pair.source_lang;
  ladder.measured = measure_ladder(ladder.steps, ladder.source_lang, ladder.dest_lang);
  return ladder;
}

LadderCheck check_ladder(const std::array<double, kLadderSteps>& measured, const GenerationPolicy& policy) {
  LadderCheck c;
  c.monotone = std::is_sorted(measured.begin(), measured.end());
  c.within_band = true;
  for (std::size_t i = 0; i < kLadderSteps; ++i) {
    const double dev = std::abs(measured[i] - kLadderTargets[i]);
    c.max_deviation = std::max(c.max_deviation, dev);
    if (dev > policy.step_tolerance) c.within_band = false;
  }
  c.endpoints_pure = measured.front() <= policy.purity_tolerance && measured.back() >= 1.0 - policy.purity_tolerance;
  return c;
}

LadderOutcome validate_and_regenerate(const ParallelPair& pair, Direction direction, const GenerationPolicy& policy,
                                      TextGenerator& generator, const PromptLibrary& prompts) {
  policy.validate();
  const LanguageTag& matrix = direction == Direction::tgt_to_en ? pair.source_lang : english();
  std::optional<LadderOutcome> best;
  double best_deviation = std::numeric_limits<double>::infinity();
  std::vector<std::string> failures;

  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    CsSentence cs;
    CodeSwitchLadder ladder;
    try {
      cs = generate_cs(pair, matrix, generator, prompts);
      ladder = generate_ladder(pair, cs, direction, generator, prompts);
    } catch (const LadderParseError& e) {
      failures.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
      continue;
    }
    const LadderCheck check = check_ladder(ladder.measured, policy);
    LadderOutcome outcome{ladder, cs, attempt, check.accepted(), failures};
    if (check.accepted()) return outcome;

    std::string why = !check.monotone ? "non-monotone" : !check.endpoints_pure ? "impure endpoint" : "outside band";
    failures.push_back("attempt " + std::to_string(attempt) + ": " + why + " (max deviation " +
                       format_fixed(check.max_deviation, 3) + ")");
    // Non-monotone ladders rank behind every monotone one.
    const double score = check.max_deviation + (check.monotone ? 0.0 : 1.0);
    if (score < best_deviation) {
      best_deviation = score;
      best = std::move(outcome);
    }
  }
  if (!best)
    throw LadderParseError("no parseable ladder for pair " + pair.id + " after " +
                           std::to_string(policy.max_attempts) + " attempts: " + join(failures, "; "));
  best->attempts = policy.max_attempts;
  best->valid = false;
  best->failures = failures;
  return *best;
}

std::vector<std::string> generate_paraphrases(std::string_view text, const LanguageTag& lang, std::size_t count,
                                              TextGenerator& generator, const PromptLibrary& prompts) {
  GenerationRequest req;
  req.task = GenerationTask::paraphrase;
  req.system = prompts.render("codeswitch/paraphrase", {{"language", lang.name}, {"count", std::to_string(count)}});
  req.user = prompts.render("codeswitch/paraphrase_input", {{"language", lang.name}, {"source", std::string(text)}});
  req.paraphrase_lang = lang;
  req.paraphrase_source = std::string(text);
  req.paraphrase_count = count;
  return parse_numbered_lines(generator.generate(req), count);
}

namespace {

json lang_json(const LanguageTag& l) { return l.code; }

json pair_json(const ParallelPair& p) {
  return {{"id", p.id}, {"source_text", p.source_text}, {"english_text", p.english_text},
          {"source_lang", p.source_lang.code}};
}

json policy_json(const GenerationPolicy& p) {
  return {{"max_attempts", p.max_attempts}, {"step_tolerance", p.step_tolerance},
          {"purity_tolerance", p.purity_tolerance}};
}

}  // namespace

json to_json(const LadderOutcome& o) {
  json j;
  j["steps"] = o.ladder.steps;
  j["direction"] = to_string(o.ladder.direction);
  j["measured_fractions"] = o.ladder.measured;
  j["target_fractions"] = kLadderTargets;
  j["source_lang"] = lang_json(o.ladder.source_lang);
  j["dest_lang"] = lang_json(o.ladder.dest_lang);
  j["code_switched"] = {{"text", o.cs.text},
                        {"matrix", lang_json(o.cs.matrix_lang)},
                        {"embedded", lang_json(o.cs.embedded_lang)},
                        {"embedded_fraction", o.cs.embedded_fraction}};
  j["attempts"] = o.attempts;
  j["valid"] = o.valid;
  j["failures"] = o.failures;
  return j;
}

LadderOutcome ladder_outcome_from_json(const json& j) {
  LadderOutcome o;
  o.ladder.steps = j.at("steps").get<std::array<std::string, kLadderSteps>>();
  o.ladder.direction = parse_direction(j.at("direction").get<std::string>());
  o.ladder.measured = j.at("measured_fractions").get<std::array<double, kLadderSteps>>();
  o.ladder.source_lang = language(j.at("source_lang").get<std::string>());
  o.ladder.dest_lang = language(j.at("dest_lang").get<std::string>());
  const auto& cs = j.at("code_switched");
  o.cs.text = cs.at("text").get<std::string>();
  o.cs.matrix_lang = language(cs.at("matrix").get<std::string>());
  o.cs.embedded_lang = language(cs.at("embedded").get<std::string>());
  o.cs.embedded_fraction = cs.at("embedded_fraction").get<double>();
  o.attempts = j.at("attempts").get<int>();
  o.valid = j.at("valid").get<bool>();
  o.failures = j.value("failures", std::vector<std::string>{});
  return o;
}

DemoCache::DemoCache(const std::filesystem::path& cache_dir)
    : ladders_(cache_dir / "ladders"), paraphrases_(cache_dir / "paraphrases") {}

std::string DemoCache::ladder_digest(const ParallelPair& pair, Direction direction, const std::string& generator_id,
                                     const GenerationPolicy& policy) {
  const json key{{"pair", pair_json(pair)},
                 {"direction", to_string(direction)},
                 {"generator", generator_id},
                 {"policy", policy_json(policy)}};
  return sha256_hex(key.dump());
}

std::optional<LadderOutcome> DemoCache::find_ladder(const ParallelPair& pair, Direction direction,
                                                    const std::string& generator_id,
                                                    const GenerationPolicy& policy) const {
  const auto doc = ladders_.get(ladder_digest(pair, direction, generator_id, policy));
  if (!doc) return std::nullopt;
  return ladder_outcome_from_json(*doc);
}

DemoCache::LadderResult DemoCache::ladder(const ParallelPair& pair, Direction direction,
                                          const GenerationPolicy& policy, TextGenerator& generator,
                                          const PromptLibrary& prompts) {
  const std::string digest = ladder_digest(pair, direction, generator.id(), policy);
  if (auto doc = ladders_.get(digest)) return {ladder_outcome_from_json(*doc), digest, true};
  LadderOutcome outcome = validate_and_regenerate(pair, direction, policy, generator, prompts);
  json doc = to_json(outcome);
  doc["digest"] = digest;
  doc["pair"] = pair_json(pair);
  doc["generator"] = generator.id();
  doc["policy"] = policy_json(policy);
  ladders_.put(digest, doc);
  return {std::move(outcome), digest, false};
}

std::string DemoCache::paraphrase_digest(const std::string& text, const LanguageTag& lang, std::size_t count,
                                         const std::string& generator_id) {
  const json key{{"text", text}, {"language", lang.code}, {"count", count}, {"generator", generator_id}};
  return sha256_hex(key.dump());
}

std::optional<std::vector<std::string>> DemoCache::find_paraphrases(const std::string& text, const LanguageTag& lang,
                                                                    std::size_t count,
                                                                    const std::string& generator_id) const {
  const auto doc = paraphrases_.get(paraphrase_digest(text, lang, count, generator_id));
  if (!doc) return std::nullopt;
  return doc->at("paraphrases").get<std::vector<std::string>>();
}

DemoCache::ParaphraseResult DemoCache::paraphrases(const std::string& text, const LanguageTag& lang,
                                                   std::size_t count, TextGenerator& generator,
                                                   const PromptLibrary& prompts) {
  const std::string digest = paraphrase_digest(text, lang, count, generator.id());
  if (auto doc = paraphrases_.get(digest)) return {doc->at("paraphrases").get<std::vector<std::string>>(), digest, true};
  auto list = generate_paraphrases(text, lang, count, generator, prompts);
  paraphrases_.put(digest, json{{"digest", digest},
                                {"text", text},
                                {"language", lang.code},
                                {"generator", generator.id()},
                                {"paraphrases", list}});
  return {std::move(list), digest, false};
}

}  // namespace csicl
