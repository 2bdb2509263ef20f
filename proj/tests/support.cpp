#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <algorithm>
#include <random>
#include <thread>

#include "csicl/util/text.hpp"

namespace csicl::test {

namespace fs = std::filesystem;

fs::path fixture(const std::string& name) { return fs::path(CSICL_TEST_DIR) / "fixtures" / name; }
fs::path golden(const std::string& name) { return fs::path(CSICL_TEST_DIR) / "golden" / name; }

TempDir::TempDir() {
  std::random_device rd;
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() / ("csicl-test-" + std::to_string(stamp) + "-" + std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ScriptedGenerator::ScriptedGenerator(std::vector<std::string> replies, std::string id)
    : replies_(std::move(replies)), id_(std::move(id)) {}

std::string ScriptedGenerator::generate(const GenerationRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  const auto n = static_cast<std::size_t>(calls_++);
  if (replies_.empty()) throw GeneratorError("scripted generator has no replies");
  return replies_[std::min(n, replies_.size() - 1)];
}

std::vector<GenerationRequest> ScriptedGenerator::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

HttpReply ScriptedTransport::post(const ModelEndpoint&, const std::string& body) {
  const int now = ++in_flight_;
  int prev = peak_.load();
  while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
  }
  const auto parsed = nlohmann::json::parse(body);
  int call = 0;
  {
    std::lock_guard lock(mu_);
    bodies_.push_back(parsed);
    call = calls_++;
  }
  // Hold the slot briefly so overlapping calls are observable.
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  HttpReply reply = handler_(parsed, call);
  --in_flight_;
  return reply;
}

std::vector<nlohmann::json> ScriptedTransport::bodies() const {
  std::lock_guard lock(mu_);
  return bodies_;
}

HttpReply ok_reply(const std::string& text) {
  nlohmann::json j{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}, {"finish_reason", "stop"}}}},
                   {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 2}}}};
  return {200, j.dump(), ""};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  return out;
}

std::string check_golden(const std::string& name, const std::string& actual) {
  const fs::path p = golden(name);
  const char* update = std::getenv("CSICL_UPDATE_GOLDENS");
  if ((update && std::string(update) == "1") || !fs::exists(p)) {
    if (!update || std::string(update) != "1") return "<missing golden " + p.string() + ">";
    write_file_atomic(p, actual);
  }
  return read_file(p);
}

}  // namespace csicl::test

#include "csicl/corpus/corpus.hpp"

namespace csicl::test {

FixtureDemos fixture_demos() {
  // Same preparation as the pipeline with default sampling.
  const auto set = load_dataset(fixture("mini_mmlu.jsonl"), DatasetKind::globalmmlu);
  const std::vector<CellKey> keys{CellKey::subject, CellKey::language};
  const auto split = split_demos(filter_language(sample_balanced(set, 600, keys, 42), "ko"), 5, 42);
  FallbackGenerator gen;
  const PromptLibrary prompts;
  FixtureDemos out;
  for (const auto& demo : split.demo) {
    DemoShot shot;
    shot.target = demo;
    for (const auto& s : set)
      if (s.language == english() && s.id == demo.id) shot.english = s;
    const ParallelPair pair{demo.id, demo.question, shot.english->question, demo.language};
    const auto t2e = validate_and_regenerate(pair, Direction::tgt_to_en, {}, gen, prompts);
    const auto e2t = validate_and_regenerate(pair, Direction::en_to_tgt, {}, gen, prompts);
    shot.ladder_tgt_to_en = t2e.ladder;
    shot.cs_matrix_tgt = t2e.cs.text;
    shot.ladder_en_to_tgt = e2t.ladder;
    shot.cs_matrix_en = e2t.cs.text;
    shot.paraphrases_en = generate_paraphrases(shot.english->question, english(), 4, gen, prompts);
    shot.paraphrases_tgt = generate_paraphrases(demo.question, demo.language, 4, gen, prompts);
    out.shots.push_back(std::move(shot));
  }
  out.query = split.test[0];
  out.pool = known_languages();
  return out;
}

std::string render_bundle(const PromptBundle& bundle) {
  std::string out = "=== system ===\n" + bundle.system + "\n";
  for (const auto& m : bundle.conversation()) out += "=== " + m.role + " ===\n" + m.content + "\n";
  out += "=== digest ===\n" + bundle.digest + "\n";
  return out;
}

std::string golden_name(const XiclSetting& setting) {
  std::string id = setting.id();
  std::replace(id.begin(), id.end(), ':', '_');
  return "prompts/" + id + ".txt";
}

}  // namespace csicl::test

#include "csicl/extraction/extraction.hpp"

namespace csicl::test {

std::vector<ExtractionCase> extraction_corpus() {
  std::vector<ExtractionCase> out;
  for (const auto& line : split_lines(read_file(fixture("extraction_corpus.jsonl")))) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    ExtractionCase c;
    c.number = j.at("case").get<int>();
    c.task = parse_task_kind(j.at("task").get<std::string>());
    c.response = j.at("response").get<std::string>();
    if (j.contains("letters")) c.letters = j["letters"].get<std::vector<std::string>>();
    if (j.contains("setting")) c.setting = j["setting"].get<std::string>();
    if (!j.at("expected").is_null()) c.expected = j["expected"].get<std::string>();
    c.out_of_format = j.at("out_of_format").get<bool>();
    out.push_back(std::move(c));
  }
  return out;
}

Extracted extract_case(const ExtractionCase& c) {
  switch (c.task) {
    case TaskKind::mcq: return extract_mcq(c.response, c.letters);
    case TaskKind::short_answer: return extract_short_answer(c.response);
    case TaskKind::translation: return extract_translation(c.response, XiclSetting::parse(c.setting));
  }
  return Extracted::none();
}

}  // namespace csicl::test

namespace csicl::test {

namespace {

std::vector<std::uint32_t> utf8_codepoints(const std::string& s) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    std::uint32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) & 0x3F);
    if (cp != ' ' && cp != '\t' && cp != '\n' && cp != '\r') out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

}  // namespace

double chrf_oracle(const std::string& hyp, const std::string& ref, int max_n, double beta) {
  const auto h = utf8_codepoints(hyp);
  const auto r = utf8_codepoints(ref);
  if (h.empty() && r.empty()) return 100.0;
  double p_sum = 0.0, r_sum = 0.0;
  int usable = 0;
  for (int n = 1; n <= max_n; ++n) {
    const long hn = static_cast<long>(h.size()) - n + 1;
    const long rn = static_cast<long>(r.size()) - n + 1;
    if (hn < 1 || rn < 1) continue;
    std::vector<bool> used(static_cast<std::size_t>(rn), false);
    long matches = 0;
    for (long i = 0; i < hn; ++i)
      for (long j = 0; j < rn; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        bool same = true;
        for (int k = 0; k < n && same; ++k) same = h[static_cast<std::size_t>(i + k)] == r[static_cast<std::size_t>(j + k)];
        if (same) {
          used[static_cast<std::size_t>(j)] = true;
          ++matches;
          break;
        }
      }
    p_sum += static_cast<double>(matches) / static_cast<double>(hn);
    r_sum += static_cast<double>(matches) / static_cast<double>(rn);
    ++usable;
  }
  if (usable == 0) return 0.0;
  const double p = p_sum / usable, rc = r_sum / usable;
  if (p + rc == 0.0) return 0.0;
  return 100.0 * (1 + beta * beta) * p * rc / (beta * beta * p + rc);
}

std::string random_text(std::uint64_t& state, std::size_t max_len, bool non_empty) {
  static const char* alphabet[] = {"a", "b", "c", "d", "e", " ", "가", "나", "猫", "é"};
  auto next = [&state] {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::size_t len = next() % (max_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out += alphabet[next() % 10];
  if (non_empty) out += alphabet[next() % 5];
  return out;
}

}  // namespace csicl::test

namespace csicl::test {

std::vector<double> enumerate_bootstrap(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= n;
  std::vector<double> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += diffs[c % n];
      c /= n;
    }
    out.push_back(sum / static_cast<double>(n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double ks_distance(std::vector<double> sample, std::vector<double> exact) {
  std::sort(sample.begin(), sample.end());
  std::sort(exact.begin(), exact.end());
  std::vector<double> points = sample;
  points.insert(points.end(), exact.begin(), exact.end());
  double worst = 0.0;
  for (double x : points) {
    // Compare CDFs with a small tolerance so equal means in floating point
    // land on the same step.
    auto cdf = [x](const std::vector<double>& v) {
      const auto it = std::upper_bound(v.begin(), v.end(), x + 1e-12);
      return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
    };
    worst = std::max(worst, std::abs(cdf(sample) - cdf(exact)));
  }
  return worst;
}

}  // namespace csicl::test

namespace csicl::test {

EvalRecord scored_record(const std::string& setting, const std::string& lang, const std::string& id, bool correct,
                         const std::string& model) {
  EvalRecord r;
  r.model_id = model;
  r.setting = setting;
  r.dataset = "globalmmlu";
  r.language = lang;
  r.sample_id = id;
  r.task = TaskKind::mcq;
  r.metric = "accuracy";
  r.extracted = Extracted::found(correct ? "A" : "B", ExtractMethod::marker);
  r.out_of_format = false;
  r.score = correct ? 1.0 : 0.0;
  return r;
}

std::vector<EvalRecord> reference_zero_shot() {
  const std::vector<std::pair<std::string, int>> correct{{"en", 886}, {"ko", 686}, {"zh", 862}, {"es", 862},
                                                         {"id", 621}, {"tr", 621}, {"sw", 394}, {"te", 394}};
  std::vector<EvalRecord> out;
  for (const auto& [lang, k] : correct)
    for (int i = 0; i < 1000; ++i) out.push_back(scored_record("zero_shot", lang, std::to_string(i), i < k));
  return out;
}

std::vector<ColumnSpec> reference_columns() {
  return {{"en", "En", {"en"}, false},
          {"tgt", "Tgt.", {"ko"}, false},
          {"high", "High", {"zh", "es"}, false},
          {"mid", "Mid", {"id", "tr"}, false},
          {"low", "Low", {"sw", "te"}, false}};
}

}  // namespace csicl::test
