#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "csicl/codeswitch/ladder.hpp"
#include "csicl/gateway/gateway.hpp"

namespace csicl::test {

std::filesystem::path fixture(const std::string& name);
std::filesystem::path golden(const std::string& name);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Replies from a fixed script in call order; the last entry repeats.
class ScriptedGenerator final : public TextGenerator {
 public:
  explicit ScriptedGenerator(std::vector<std::string> replies, std::string id = "scripted");
  std::string id() const override { return id_; }
  std::string generate(const GenerationRequest& request) override;
  int calls() const noexcept { return calls_.load(); }
  std::vector<GenerationRequest> requests() const;

 private:
  std::vector<std::string> replies_;
  std::string id_;
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::vector<GenerationRequest> requests_;
};

/// Counts calls to a wrapped generator.
class CountingGenerator final : public TextGenerator {
 public:
  explicit CountingGenerator(TextGenerator& inner) : inner_(inner) {}
  std::string id() const override { return inner_.id(); }
  std::string generate(const GenerationRequest& request) override {
    ++calls_;
    return inner_.generate(request);
  }
  int calls() const noexcept { return calls_.load(); }

 private:
  TextGenerator& inner_;
  std::atomic<int> calls_{0};
};

/// Transport driven by a callback; records bodies and peak concurrency.
class ScriptedTransport final : public ChatTransport {
 public:
  using Handler = std::function<HttpReply(const nlohmann::json& body, int call)>;
  explicit ScriptedTransport(Handler handler) : handler_(std::move(handler)) {}
  HttpReply post(const ModelEndpoint& endpoint, const std::string& body) override;
  int calls() const noexcept { return calls_.load(); }
  int peak_in_flight() const noexcept { return peak_.load(); }
  std::vector<nlohmann::json> bodies() const;

 private:
  Handler handler_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  mutable std::mutex mu_;
  std::vector<nlohmann::json> bodies_;
};

/// A well-formed chat-completion reply carrying `text`.
HttpReply ok_reply(const std::string& text);

/// Sleeper that records requested delays instead of sleeping.
struct RecordingSleeper {
  std::shared_ptr<std::vector<std::chrono::milliseconds>> delays = std::make_shared<std::vector<std::chrono::milliseconds>>();
  Sleeper fn() const {
    auto d = delays;
    return [d](std::chrono::milliseconds ms) { d->push_back(ms); };
  }
};

/// Byte contents of every regular file under root, keyed by relative path.
std::map<std::string, std::string> snapshot(const std::filesystem::path& root);

/// Reads a golden file, or rewrites it when CSICL_UPDATE_GOLDENS=1.
/// Returns the expected contents.
std::string check_golden(const std::string& name, const std::string& actual);

}  // namespace csicl::test

#include "csicl/promptkit/assemble.hpp"
#include "csicl/report/report.hpp"

namespace csicl::test {

/// The fixture demo set: five Korean demonstrations drawn from the mini
/// dataset with seed 42, their English counterparts, fallback ladders in both
/// directions and four fallback paraphrases per side.
struct FixtureDemos {
  std::vector<DemoShot> shots;
  /// A Korean test item (not a demonstration).
  Sample query;
  std::vector<LanguageTag> pool;
};
FixtureDemos fixture_demos();

/// Human-readable dump of a bundle: system prompt, then each turn.
std::string render_bundle(const PromptBundle& bundle);

/// File name of a setting's golden, e.g. "prompts/csicl_tgt_to_en.txt".
std::string golden_name(const XiclSetting& setting);

}  // namespace csicl::test

namespace csicl::test {

struct ExtractionCase {
  int number = 0;
  TaskKind task = TaskKind::mcq;
  std::string response;
  std::vector<std::string> letters;
  std::string setting;
  std::optional<std::string> expected;
  bool out_of_format = false;
};
std::vector<ExtractionCase> extraction_corpus();
/// Runs the extractor a case calls for.
Extracted extract_case(const ExtractionCase& c);

}  // namespace csicl::test

namespace csicl::test {

/// Brute-force chrF: n-gram occurrences are matched pairwise by position
/// scanning, with its own UTF-8 decoding and no shared code.
double chrf_oracle(const std::string& hyp, const std::string& ref, int max_n = 6, double beta = 2.0);

/// Random string over a small mixed-script alphabet, including spaces.
std::string random_text(std::uint64_t& state, std::size_t max_len, bool non_empty);

}  // namespace csicl::test

namespace csicl::test {

/// Every resample mean of `diffs` (n^n equally likely outcomes), sorted.
std::vector<double> enumerate_bootstrap(const std::vector<double>& diffs);

/// Kolmogorov-Smirnov distance between an empirical sample and the uniform
/// distribution over `exact` outcomes.
double ks_distance(std::vector<double> sample, std::vector<double> exact);

}  // namespace csicl::test

namespace csicl::test {

/// Accuracy record with a 0/1 score.
EvalRecord scored_record(const std::string& setting, const std::string& lang, const std::string& id, bool correct,
                         const std::string& model = "m");

/// Zero-shot records whose per-language accuracies are En 886/1000,
/// Ko 686/1000, zh and es 862/1000, id and tr 621/1000, sw and te 394/1000.
std::vector<EvalRecord> reference_zero_shot();

/// En, Tgt. (ko), High (zh, es), Mid (id, tr), Low (sw, te).
std::vector<ColumnSpec> reference_columns();

}  // namespace csicl::test
