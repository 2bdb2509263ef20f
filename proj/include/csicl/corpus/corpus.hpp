#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "csicl/corpus/language.hpp"

namespace csicl {

enum class DatasetKind { globalmmlu, flores, medexpqa, polymath, blend, mbbq, custom };
enum class TaskKind { mcq, short_answer, translation };

std::string_view to_string(DatasetKind kind) noexcept;
std::string_view to_string(TaskKind kind) noexcept;
DatasetKind parse_dataset_kind(std::string_view name);
TaskKind parse_task_kind(std::string_view name);

struct Choice {
  std::string letter;
  std::string text;
};

/// One evaluation item.
///
/// `gold` holds choice letters for mcq, answers normalized with
/// normalize_answer for short_answer, and exactly one reference for
/// translation. Translation samples keep the source text in `question`.
struct Sample {
  std::string id;
  DatasetKind dataset = DatasetKind::custom;
  LanguageTag language;
  TaskKind task = TaskKind::mcq;
  std::string question;
  std::vector<Choice> choices;
  std::vector<std::string> gold;
  std::optional<std::string> subject;
  std::optional<std::string> template_id;
  std::optional<bool> ambiguous;

  std::vector<std::string> choice_letters() const;
  /// Subject, or "(none)" for datasets without subjects.
  std::string subject_or_none() const;
};

/// Thrown for records that violate the dataset schema or Sample invariants.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t line, std::string id, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  const std::string& id() const noexcept { return id_; }

 private:
  std::size_t line_;
  std::string id_;
};

/// Checks Sample invariants; throws SchemaError (line 0) on violation.
void validate_sample(const Sample& s);

struct ParallelPair {
  std::string id;
  std::string source_text;
  std::string english_text;
  LanguageTag source_lang;

  /// Throws std::invalid_argument on empty text or an English source.
  void validate() const;
};

struct Provenance {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::string filter;
};

/// Immutable ordered collection of samples.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::vector<Sample> samples, Provenance provenance);

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  auto begin() const noexcept { return samples_.begin(); }
  auto end() const noexcept { return samples_.end(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  const Sample* find(std::string_view id) const noexcept;

 private:
  std::vector<Sample> samples_;
  Provenance provenance_;
};

/// Reads a line-delimited JSON dataset. See docs/dataset_schema.md.
SampleSet load_dataset(const std::filesystem::path& path, DatasetKind kind);

enum class CellKey { subject, language };

/// Draws min(per_cell, |cell|) samples per (subject x language) cell without
/// replacement. Each cell has its own stream seeded from
/// (seed, subject, language), so cells do not perturb each other. Output is
/// cell-major (cells sorted by key) then draw order.
SampleSet sample_balanced(const SampleSet& set, std::size_t per_cell, std::span<const CellKey> cell_keys,
                          std::uint64_t seed);

/// Per template: min(per_template/2, available) ambiguous and as many
/// unambiguous samples.
SampleSet sample_mbbq(const SampleSet& set, std::size_t per_template, std::uint64_t seed);

struct DemoSplit {
  SampleSet demo;
  SampleSet test;
};

/// Draws k demonstration samples; the test set keeps input order.
DemoSplit split_demos(const SampleSet& set, std::size_t k, std::uint64_t seed);

/// Samples of one language, in order.
SampleSet filter_language(const SampleSet& set, std::string_view code);

/// Removes samples whose id is listed.
SampleSet exclude_ids(const SampleSet& set, std::span<const std::string> ids);

SampleSet concat(std::span<const SampleSet> sets);

/// Canonical JSONL rendering, used for byte-level determinism checks.
std::string to_jsonl(const SampleSet& set);

}  // namespace csicl
