#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csicl/corpus/corpus.hpp"
#include "csicl/extraction/extraction.hpp"

namespace csicl {

struct ChrfParams {
  int max_n = 6;
  double beta = 2.0;

  /// Throws std::invalid_argument unless max_n >= 1 and beta > 0.
  void validate() const;
};

/// Character n-gram F-score in [0, 100] on whitespace-stripped text.
/// Precision and recall are each averaged over n = 1..max_n, skipping any n
/// for which either side has no n-grams, then combined with weight beta.
/// Both sides empty gives 100; otherwise no usable n gives 0.
double chrf(std::string_view hypothesis, std::string_view reference, const ChrfParams& params = {});

enum class TranslationBackend { chrf, comet_bridge };

std::string_view to_string(TranslationBackend b) noexcept;
TranslationBackend parse_backend(std::string_view s);

struct MetricParams {
  ChrfParams chrf;
  TranslationBackend backend = TranslationBackend::chrf;
};

/// 1 iff pred is one of gold. Both sides must already be normalized.
int exact_match(std::string_view pred, std::span<const std::string> gold);

struct TranslationTriple {
  std::string source;
  std::string hypothesis;
  std::string reference;
};

class BridgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Client for the COMET scoring service: POST <endpoint>/score with
/// {"pairs": [{source, hypothesis, reference}]}, reply {"scores": [...]}.
class CometBridgeClient {
 public:
  explicit CometBridgeClient(std::string endpoint, double timeout_seconds = 300.0);

  const std::string& endpoint() const noexcept { return endpoint_; }

  /// Scores in [0, 1], aligned with `pairs`. Throws BridgeError naming the
  /// endpoint when it is unreachable or replies with anything unexpected.
  std::vector<double> score(std::span<const TranslationTriple> pairs) const;

 private:
  std::string endpoint_;
  double timeout_seconds_;
};

/// chrF, or the bridge score rescaled to [0, 100]. A comet_bridge backend
/// without a client is an error; there is no silent fallback.
std::vector<double> score_translations(std::span<const TranslationTriple> items, const MetricParams& params,
                                       const CometBridgeClient* bridge);
double score_translation(std::string_view hyp, std::string_view ref, std::string_view src, const MetricParams& params,
                         const CometBridgeClient* bridge);

/// Name of the metric used for a task: accuracy, exact_match, chrf or comet.
std::string metric_name(TaskKind task, const MetricParams& params);

/// Per-item outcome of one (model, setting, sample) query.
struct EvalRecord {
  std::string model_id;
  std::string setting;
  std::string dataset;
  std::string language;
  std::string sample_id;
  TaskKind task = TaskKind::mcq;
  std::optional<std::string> subject;
  std::string prompt_digest;
  std::string response;
  Extracted extracted;
  std::string metric;
  /// [0, 1] for accuracy and exact match, [0, 100] for translation metrics.
  double score = 0.0;
  bool out_of_format = true;
  /// Set when the query itself failed; such records are retried on resume.
  std::optional<std::string> error;

  bool is_error() const noexcept { return error.has_value(); }
  /// "language:sample_id", the pairing key for bootstrap vectors.
  std::string item_key() const { return language + ":" + sample_id; }
};

nlohmann::json to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(const nlohmann::json& j);

/// Score for an mcq or short-answer item: 1 when the extracted value is in
/// the gold set, 0 otherwise (including out of format).
double score_choice_or_short(const Sample& sample, const Extracted& extracted);

/// Mean of 1{extracted letter in gold}; out-of-format records count as 0.
/// Throws std::invalid_argument for non-mcq records or empty input.
double accuracy(std::span<const EvalRecord> records);

}  // namespace csicl
