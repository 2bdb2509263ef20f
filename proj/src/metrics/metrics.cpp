#include <algorithm>
#include <stdexcept>

#include "csicl/metrics/metrics.hpp"

namespace csicl {

using nlohmann::json;

std::string_view to_string(TranslationBackend b) noexcept {
  return b == TranslationBackend::chrf ? "chrf" : "comet_bridge";
}

TranslationBackend parse_backend(std::string_view s) {
  if (s == "chrf") return TranslationBackend::chrf;
  if (s == "comet_bridge") return TranslationBackend::comet_bridge;
  throw std::invalid_argument("unknown translation metric backend: " + std::string(s));
}

int exact_match(std::string_view pred, std::span<const std::string> gold) {
  return std::find(gold.begin(), gold.end(), pred) != gold.end() ? 1 : 0;
}

std::vector<double> score_translations(std::span<const TranslationTriple> items, const MetricParams& params,
                                       const CometBridgeClient* bridge) {
  std::vector<double> out;
  out.reserve(items.size());
  if (params.backend == TranslationBackend::chrf) {
    for (const auto& t : items) out.push_back(chrf(t.hypothesis, t.reference, params.chrf));
    return out;
  }
  if (!bridge) throw BridgeError("metric backend comet_bridge selected but no bridge endpoint is configured");
  if (items.empty()) return out;
  for (double s : bridge->score(items)) out.push_back(100.0 * s);
  return out;
}

double score_translation(std::string_view hyp, std::string_view ref, std::string_view src, const MetricParams& params,
                         const CometBridgeClient* bridge) {
  const TranslationTriple t{std::string(src), std::string(hyp), std::string(ref)};
  return score_translations(std::span(&t, 1), params, bridge).front();
}

std::string metric_name(TaskKind task, const MetricParams& params) {
  switch (task) {
    case TaskKind::mcq: return "accuracy";
    case TaskKind::short_answer: return "exact_match";
    case TaskKind::translation: return params.backend == TranslationBackend::chrf ? "chrf" : "comet";
  }
  return "accuracy";
}

double score_choice_or_short(const Sample& sample, const Extracted& extracted) {
  if (sample.task == TaskKind::translation)
    throw std::invalid_argument("score_choice_or_short: translation sample " + sample.id);
  if (extracted.out_of_format || !extracted.value) return 0.0;
  return exact_match(*extracted.value, sample.gold);
}

double accuracy(std::span<const EvalRecord> records) {
  if (records.empty()) throw std::invalid_argument("accuracy: no records");
  double correct = 0.0;
  for (const auto& r : records) {
    if (r.task != TaskKind::mcq) throw std::invalid_argument("accuracy: record " + r.sample_id + " is not mcq");
    if (!r.out_of_format && !r.is_error()) correct += r.score;
  }
  return correct / static_cast<double>(records.size());
}

json to_json(const EvalRecord& r) {
  json j{{"model_id", r.model_id},
         {"setting", r.setting},
         {"dataset", r.dataset},
         {"language", r.language},
         {"sample_id", r.sample_id},
         {"task", to_string(r.task)},
         {"subject", r.subject ? json(*r.subject) : json(nullptr)},
         {"prompt_digest", r.prompt_digest},
         {"response", r.response},
         {"extracted",
          {{"value", r.extracted.value ? json(*r.extracted.value) : json(nullptr)},
           {"out_of_format", r.extracted.out_of_format},
           {"method", to_string(r.extracted.method)}}},
         {"metric", r.metric},
         {"score", r.score},
         {"out_of_format", r.out_of_format},
         {"error", r.error ? json(*r.error) : json(nullptr)}};
  return j;
}

EvalRecord eval_record_from_json(const json& j) {
  EvalRecord r;
  r.model_id = j.at("model_id").get<std::string>();
  r.setting = j.at("setting").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.language = j.at("language").get<std::string>();
  r.sample_id = j.at("sample_id").get<std::string>();
  r.task = parse_task_kind(j.at("task").get<std::string>());
  if (!j.at("subject").is_null()) r.subject = j["subject"].get<std::string>();
  r.prompt_digest = j.at("prompt_digest").get<std::string>();
  r.response = j.at("response").get<std::string>();
  const json& e = j.at("extracted");
  if (!e.at("value").is_null()) r.extracted.value = e["value"].get<std::string>();
  r.extracted.out_of_format = e.at("out_of_format").get<bool>();
  r.extracted.method = parse_extract_method(e.at("method").get<std::string>());
  r.metric = j.at("metric").get<std::string>();
  r.score = j.at("score").get<double>();
  r.out_of_format = j.at("out_of_format").get<bool>();
  if (!j.at("error").is_null()) r.error = j["error"].get<std::string>();
  return r;
}

}  // namespace csicl
