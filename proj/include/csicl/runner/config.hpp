#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csicl/codeswitch/ladder.hpp"
#include "csicl/corpus/corpus.hpp"
#include "csicl/gateway/gateway.hpp"
#include "csicl/metrics/metrics.hpp"
#include "csicl/promptkit/setting.hpp"
#include "csicl/stats/bootstrap.hpp"

namespace csicl {

struct DatasetSpec {
  std::filesystem::path path;
  DatasetKind kind = DatasetKind::custom;
  /// Label used in tables and record keys; defaults to the kind name.
  std::string name;
};

/// How demonstration ids relate across languages. parallel_id: demo ids are
/// removed from every language's test set, and English shots use the same
/// ids. per_language: only the target test set loses the demo ids.
enum class DemoSharing { parallel_id, per_language };

struct RunConfig {
  /// Directory relative paths are resolved against.
  std::filesystem::path base_dir = ".";
  std::vector<DatasetSpec> datasets;
  std::string target_language = "ko";
  bool include_english = true;
  std::vector<std::string> unseen_high{"zh", "es"};
  std::vector<std::string> unseen_mid{"id", "tr"};
  std::vector<std::string> unseen_low{"sw", "te"};
  std::vector<ModelEndpoint> models;
  std::vector<XiclSetting> settings = main_settings();
  std::size_t k_shots = 5;
  std::uint64_t seed = 42;
  double temperature = 0.0;
  /// Balanced draw per (subject, language) cell.
  std::size_t per_cell = 600;
  std::size_t mbbq_per_template = 10;
  DemoSharing demo_sharing = DemoSharing::parallel_id;
  /// "fallback" or the id of a configured model.
  std::string generator = "fallback";
  GenerationPolicy generation;
  std::size_t paraphrases_per_shot = 4;
  MetricParams metrics;
  BootstrapParams bootstrap;
  std::string stats_target = "csicl:tgt_to_en";
  std::string delta_baseline = "zero_shot";
  /// Destinations for translate_cot:random; empty means every known language.
  std::vector<std::string> random_pool;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path results_dir = "results";
  std::size_t max_in_flight = 4;
  std::optional<std::string> bridge_endpoint;
  bool strip_reasoning = true;
  std::string reasoning_open = "<think>";
  std::string reasoning_close = "</think>";

  std::vector<std::string> unseen_languages() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
  void validate() const;
};

std::string_view to_string(DemoSharing d) noexcept;

/// Reads a JSON config; unspecified keys keep their defaults. Unknown keys
/// are rejected so typos do not silently fall back to defaults.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Every field after defaults are applied, paths included.
nlohmann::json resolved_json(const RunConfig& cfg);

/// Content hash of the resolved config with dataset paths replaced by the
/// SHA-256 of their contents and other paths dropped. 16 hex digits.
std::string run_id(const RunConfig& cfg);

}  // namespace csicl
