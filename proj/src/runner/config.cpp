#include "csicl/runner/config.hpp"

#include <set>
#include <stdexcept>

#include "csicl/util/digest.hpp"
#include "csicl/util/text.hpp"

namespace csicl {

using nlohmann::json;

std::string_view to_string(DemoSharing d) noexcept {
  return d == DemoSharing::parallel_id ? "parallel_id" : "per_language";
}

std::vector<std::string> RunConfig::unseen_languages() const {
  std::vector<std::string> out = unseen_high;
  out.insert(out.end(), unseen_mid.begin(), unseen_mid.end());
  out.insert(out.end(), unseen_low.begin(), unseen_low.end());
  return out;
}

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

void RunConfig::validate() const {
  const auto& tgt = language(target_language);
  if (tgt == english()) throw std::invalid_argument("config: target_language must not be English");
  for (const auto& code : unseen_languages()) {
    language(code);
    if (code == target_language || code == "en")
      throw std::invalid_argument("config: unseen language " + code + " is the target or English");
  }
  for (const auto& code : random_pool) language(code);
  if (k_shots < 1) throw std::invalid_argument("config: k_shots must be >= 1");
  if (max_in_flight < 1) throw std::invalid_argument("config: max_in_flight must be >= 1");
  if (settings.empty()) throw std::invalid_argument("config: no settings");
  generation.validate();
  metrics.chrf.validate();
  bootstrap.validate();
  std::set<std::string> ids;
  for (const auto& m : models)
    if (!ids.insert(m.id).second) throw std::invalid_argument("config: duplicate model id " + m.id);
  if (generator != "fallback" && !ids.count(generator))
    throw std::invalid_argument("config: generator " + generator + " is neither \"fallback\" nor a configured model");
  if (metrics.backend == TranslationBackend::comet_bridge && !bridge_endpoint)
    throw std::invalid_argument("config: metrics.backend comet_bridge requires bridge_endpoint");
  std::set<std::string> names;
  for (const auto& d : datasets)
    if (!names.insert(d.name).second) throw std::invalid_argument("config: duplicate dataset name " + d.name);
}

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> keys, std::string_view where) {
  for (const auto& [k, _] : j.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw std::invalid_argument("config: unknown key \"" + k + "\" in " + std::string(where));
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

}  // namespace

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(j,
                 {"datasets", "target_language", "include_english", "unseen_languages", "models", "settings",
                  "k_shots", "seed", "temperature", "per_cell", "mbbq_per_template", "demo_sharing", "generator",
                  "generation", "paraphrases_per_shot", "metrics", "bootstrap", "stats_target", "delta_baseline",
                  "random_pool", "cache_dir", "results_dir", "max_in_flight", "bridge_endpoint", "strip_reasoning",
                  "reasoning_markers"},
                 "config");
  RunConfig c;
  c.base_dir = base_dir;
  if (j.contains("datasets"))
    for (const auto& d : j["datasets"]) {
      reject_unknown(d, {"path", "kind", "name"}, "datasets[]");
      DatasetSpec s;
      s.path = d.at("path").get<std::string>();
      s.kind = parse_dataset_kind(d.value("kind", std::string("custom")));
      s.name = d.value("name", std::string(to_string(s.kind)));
      c.datasets.push_back(s);
    }
  read(j, "target_language", c.target_language);
  read(j, "include_english", c.include_english);
  if (j.contains("unseen_languages")) {
    const json& u = j["unseen_languages"];
    reject_unknown(u, {"high", "mid", "low"}, "unseen_languages");
    read(u, "high", c.unseen_high);
    read(u, "mid", c.unseen_mid);
    read(u, "low", c.unseen_low);
  }
  if (j.contains("models"))
    for (const auto& m : j["models"]) {
      reject_unknown(m,
                     {"id", "model", "endpoint", "api_key_env", "requests_per_minute", "min_temperature",
                      "max_tokens", "timeout_seconds"},
                     "models[]");
      ModelEndpoint e;
      e.id = m.at("id").get<std::string>();
      read(m, "model", e.model);
      read(m, "endpoint", e.base_url);
      read(m, "api_key_env", e.api_key_env);
      read(m, "requests_per_minute", e.requests_per_minute);
      if (m.contains("min_temperature") && !m["min_temperature"].is_null())
        e.min_temperature = m["min_temperature"].get<double>();
      if (m.contains("max_tokens") && !m["max_tokens"].is_null()) e.max_tokens = m["max_tokens"].get<int>();
      read(m, "timeout_seconds", e.timeout_seconds);
      c.models.push_back(e);
    }
  if (j.contains("settings")) {
    c.settings.clear();
    for (const auto& s : j["settings"]) c.settings.push_back(XiclSetting::parse(s.get<std::string>()));
  }
  read(j, "k_shots", c.k_shots);
  read(j, "seed", c.seed);
  read(j, "temperature", c.temperature);
  read(j, "per_cell", c.per_cell);
  read(j, "mbbq_per_template", c.mbbq_per_template);
  if (j.contains("demo_sharing")) {
    const auto v = j["demo_sharing"].get<std::string>();
    if (v == "parallel_id") c.demo_sharing = DemoSharing::parallel_id;
    else if (v == "per_language") c.demo_sharing = DemoSharing::per_language;
    else throw std::invalid_argument("config: demo_sharing must be parallel_id or per_language");
  }
  read(j, "generator", c.generator);
  if (j.contains("generation")) {
    const json& g = j["generation"];
    reject_unknown(g, {"max_attempts", "step_tolerance", "purity_tolerance"}, "generation");
    read(g, "max_attempts", c.generation.max_attempts);
    read(g, "step_tolerance", c.generation.step_tolerance);
    read(g, "purity_tolerance", c.generation.purity_tolerance);
  }
  read(j, "paraphrases_per_shot", c.paraphrases_per_shot);
  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    reject_unknown(m, {"chrf_max_n", "chrf_beta", "backend"}, "metrics");
    read(m, "chrf_max_n", c.metrics.chrf.max_n);
    read(m, "chrf_beta", c.metrics.chrf.beta);
    if (m.contains("backend")) c.metrics.backend = parse_backend(m["backend"].get<std::string>());
  }
  if (j.contains("bootstrap")) {
    const json& b = j["bootstrap"];
    reject_unknown(b, {"iterations", "ci_level"}, "bootstrap");
    read(b, "iterations", c.bootstrap.iterations);
    read(b, "ci_level", c.bootstrap.ci_level);
  }
  read(j, "stats_target", c.stats_target);
  read(j, "delta_baseline", c.delta_baseline);
  read(j, "random_pool", c.random_pool);
  if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
  if (j.contains("results_dir")) c.results_dir = j["results_dir"].get<std::string>();
  read(j, "max_in_flight", c.max_in_flight);
  if (j.contains("bridge_endpoint") && !j["bridge_endpoint"].is_null())
    c.bridge_endpoint = j["bridge_endpoint"].get<std::string>();
  read(j, "strip_reasoning", c.strip_reasoning);
  if (j.contains("reasoning_markers")) {
    const auto m = j["reasoning_markers"].get<std::vector<std::string>>();
    if (m.size() != 2) throw std::invalid_argument("config: reasoning_markers must be [open, close]");
    c.reasoning_open = m[0];
    c.reasoning_close = m[1];
  }
  c.bootstrap.seed = c.seed;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  RunConfig c = config_from_json(j, path.parent_path().empty() ? "." : path.parent_path());
  c.validate();
  return c;
}

json resolved_json(const RunConfig& c) {
  json datasets = json::array();
  for (const auto& d : c.datasets)
    datasets.push_back({{"path", d.path.string()}, {"kind", to_string(d.kind)}, {"name", d.name}});
  json models = json::array();
  for (const auto& m : c.models)
    models.push_back({{"id", m.id},
                      {"model", m.wire_model()},
                      {"endpoint", m.base_url},
                      {"api_key_env", m.api_key_env},
                      {"requests_per_minute", m.requests_per_minute},
                      {"min_temperature", m.min_temperature ? json(*m.min_temperature) : json(nullptr)},
                      {"max_tokens", m.max_tokens ? json(*m.max_tokens) : json(nullptr)},
                      {"timeout_seconds", m.timeout_seconds}});
  json settings = json::array();
  for (const auto& s : c.settings) settings.push_back(s.id());
  return {{"datasets", datasets},
          {"target_language", c.target_language},
          {"include_english", c.include_english},
          {"unseen_languages", {{"high", c.unseen_high}, {"mid", c.unseen_mid}, {"low", c.unseen_low}}},
          {"models", models},
          {"settings", settings},
          {"k_shots", c.k_shots},
          {"seed", c.seed},
          {"temperature", c.temperature},
          {"per_cell", c.per_cell},
          {"mbbq_per_template", c.mbbq_per_template},
          {"demo_sharing", to_string(c.demo_sharing)},
          {"generator", c.generator},
          {"generation",
           {{"max_attempts", c.generation.max_attempts},
            {"step_tolerance", c.generation.step_tolerance},
            {"purity_tolerance", c.generation.purity_tolerance}}},
          {"paraphrases_per_shot", c.paraphrases_per_shot},
          {"metrics",
           {{"chrf_max_n", c.metrics.chrf.max_n},
            {"chrf_beta", c.metrics.chrf.beta},
            {"backend", to_string(c.metrics.backend)}}},
          {"bootstrap", {{"iterations", c.bootstrap.iterations}, {"ci_level", c.bootstrap.ci_level}}},
          {"stats_target", c.stats_target},
          {"delta_baseline", c.delta_baseline},
          {"random_pool", c.random_pool},
          {"cache_dir", c.cache_dir.string()},
          {"results_dir", c.results_dir.string()},
          {"max_in_flight", c.max_in_flight},
          {"bridge_endpoint", c.bridge_endpoint ? json(*c.bridge_endpoint) : json(nullptr)},
          {"strip_reasoning", c.strip_reasoning},
          {"reasoning_markers", {c.reasoning_open, c.reasoning_close}}};
}

std::string run_id(const RunConfig& c) {
  json j = resolved_json(c);
  for (std::size_t i = 0; i < c.datasets.size(); ++i) {
    j["datasets"][i].erase("path");
    j["datasets"][i]["sha256"] = sha256_hex(read_file(c.resolve(c.datasets[i].path)));
  }
  j.erase("cache_dir");
  j.erase("results_dir");
  // Concurrency does not change results.
  j.erase("max_in_flight");
  return sha256_hex(j.dump()).substr(0, 16);
}

}  // namespace csicl
