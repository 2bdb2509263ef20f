#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "csicl/metrics/metrics.hpp"

namespace csicl {

enum class Mark { none, best, second };

std::string_view to_string(Mark m) noexcept;
Mark parse_mark(std::string_view s);

/// Cell values are stored as integer nano-percentage-points so that sums,
/// deltas and reconstructions are exact.
struct Cell {
  std::int64_t nano = 0;
  std::size_t count = 0;
  Mark mark = Mark::none;

  double value() const noexcept { return static_cast<double>(nano) / 1e9; }
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline constexpr std::int64_t kNanoPerPoint = 1'000'000'000;

/// A column: the records whose grouping field is one of `members`. A column
/// with several members (a resource tier) is the unweighted mean of its
/// members' means.
struct ColumnSpec {
  std::string id;
  std::string label;
  std::vector<std::string> members;
  /// Set when the target row is significantly better than every baseline.
  bool significant = false;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

struct ScoreMatrix {
  std::string title;
  std::vector<std::string> row_ids;
  std::vector<std::string> row_labels;
  std::vector<ColumnSpec> columns;
  /// cells[row][column]; nullopt when no record fell into the cell.
  std::vector<std::vector<std::optional<Cell>>> cells;

  std::size_t row_index(std::string_view id) const;
  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

enum class GroupField { language, subject, model };

struct AggregateSpec {
  GroupField column_field = GroupField::language;
  /// Empty: one column per distinct field value, sorted.
  std::vector<ColumnSpec> columns;
  /// Row (setting) order; empty: sorted. Rows without records are dropped.
  std::vector<std::string> row_order;
  std::map<std::string, std::string> row_labels;
  std::string title;
};

/// Score of a record in percentage points.
double percent_score(const EvalRecord& r);
std::int64_t to_nano(double points);

/// Mean item score per (setting, column). Throws std::invalid_argument
/// ("nothing to aggregate") on empty input.
ScoreMatrix aggregate(std::span<const EvalRecord> records, const AggregateSpec& spec);

/// Per column: the highest value (to one decimal) is bold, the next distinct
/// value underlined. Tied values share the higher mark; a tie for the best
/// leaves no underline.
ScoreMatrix mark_best(ScoreMatrix matrix);

/// Cellwise difference from a baseline row; marks and flags are cleared.
ScoreMatrix delta_vs_baseline(const ScoreMatrix& matrix, std::string_view baseline_row);

enum class RenderFormat { markdown, csv, json };

struct RenderOptions {
  /// Prefix positive values with '+', for delta tables.
  bool signed_values = false;
  std::string row_header = "X-ICL setting";
};

std::string render(const ScoreMatrix& matrix, RenderFormat format, const RenderOptions& options = {});

/// Value to one decimal, rounded half away from zero.
std::string format_points(std::int64_t nano, bool signed_values = false);

nlohmann::json to_json(const ScoreMatrix& m);
ScoreMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace csicl
