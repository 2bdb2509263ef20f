#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csicl/promptkit/assemble.hpp"
#include "csicl/report/report.hpp"
#include "csicl/runner/config.hpp"

namespace csicl {

/// Test and CLI hooks; defaults suit normal runs.
struct PipelineHooks {
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  /// Print prompt or ladder digests instead of calling any model.
  bool dry_run = false;
  /// Stop after this many new model queries (to exercise resume).
  std::optional<std::size_t> limit;
  /// Replaces the default transport selection.
  std::function<std::shared_ptr<ChatTransport>(const ModelEndpoint&)> transport_for;
  /// Replaces the configured demonstration generator.
  std::shared_ptr<TextGenerator> generator;
  Sleeper sleeper;
};

/// Loaded and sampled data for one configured dataset.
struct PreparedDataset {
  DatasetSpec spec;
  TaskKind task = TaskKind::mcq;
  SampleSet full;
  /// Demo samples in the target language, in draw order.
  std::vector<Sample> demos;
  /// Evaluation languages in column order (English, target, unseen tiers).
  std::vector<std::string> languages;
  std::map<std::string, SampleSet> tests;

  const Sample* english_counterpart(const std::string& id) const;
};

/// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;

class Pipeline {
 public:
  explicit Pipeline(RunConfig config, PipelineHooks hooks = {});
  ~Pipeline();

  const RunConfig& config() const noexcept { return cfg_; }
  const std::string& run_id() const noexcept { return run_id_; }
  std::filesystem::path results_path() const;
  std::filesystem::path cache_path() const;

  /// Generates and caches every ladder and paraphrase the configured
  /// settings need; writes demos.json. kExitPartial when a ladder stayed
  /// invalid after all attempts.
  int gen_demos();
  /// Queries every (model, setting, language, sample) not yet recorded
  /// successfully; writes records.jsonl in canonical order.
  int run();
  /// Re-extracts and rescores records.jsonl from the stored responses.
  int score();
  /// Paired bootstrap of the stats target against every other setting, per
  /// (dataset, model, column); writes bootstrap.json.
  int stats();
  /// Writes table.md, table.csv, matrix.json, deltas.md, subjects.md,
  /// models.md.
  int report();

  /// Model and generator transport calls made by this pipeline.
  std::size_t network_calls() const;

  const std::vector<PreparedDataset>& datasets();
  /// Demonstration shots for a dataset with whatever cached material exists.
  std::vector<DemoShot> demo_shots(const PreparedDataset& ds, XiclSetting setting);
  /// Column layout of the main table: En, Tgt., High, Mid, Low.
  std::vector<ColumnSpec> main_columns() const;

 private:
  struct Impl;
  RunConfig cfg_;
  PipelineHooks hooks_;
  std::string run_id_;
  std::unique_ptr<Impl> impl_;
};

std::vector<EvalRecord> read_records(const std::filesystem::path& path);
/// One JSON object per line, in the given order.
void write_records(const std::filesystem::path& path, const std::vector<EvalRecord>& records);

}  // namespace csicl
