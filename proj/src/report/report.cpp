#include "csicl/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "csicl/util/text.hpp"

namespace csicl {

using nlohmann::json;

std::string_view to_string(Mark m) noexcept {
  switch (m) {
    case Mark::none: return "none";
    case Mark::best: return "best";
    case Mark::second: return "second";
  }
  return "none";
}

Mark parse_mark(std::string_view s) {
  if (s == "none") return Mark::none;
  if (s == "best") return Mark::best;
  if (s == "second") return Mark::second;
  throw std::invalid_argument("unknown mark: " + std::string(s));
}

std::size_t ScoreMatrix::row_index(std::string_view id) const {
  const auto it = std::find(row_ids.begin(), row_ids.end(), id);
  if (it == row_ids.end()) throw std::invalid_argument("no row " + std::string(id) + " in matrix");
  return static_cast<std::size_t>(it - row_ids.begin());
}

namespace {

// Integer division rounded half away from zero.
std::int64_t div_round(std::int64_t num, std::int64_t den) {
  const std::int64_t q = num / den;
  const std::int64_t r = num % den;
  if (2 * std::abs(r) >= den) return q + (num < 0 ? -1 : 1);
  return q;
}

std::string field_of(const EvalRecord& r, GroupField f) {
  switch (f) {
    case GroupField::language: return r.language;
    case GroupField::subject: return r.subject.value_or("(none)");
    case GroupField::model: return r.model_id;
  }
  return {};
}

}  // namespace

double percent_score(const EvalRecord& r) {
  return r.metric == "accuracy" || r.metric == "exact_match" ? 100.0 * r.score : r.score;
}

std::int64_t to_nano(double points) { return std::llround(points * static_cast<double>(kNanoPerPoint)); }

ScoreMatrix aggregate(std::span<const EvalRecord> records, const AggregateSpec& spec) {
  if (records.empty()) throw std::invalid_argument("nothing to aggregate");

  // Per (row, field value): item scores in nano-points. Summing sorted
  // integers keeps the result independent of record order.
  std::map<std::string, std::map<std::string, std::vector<std::int64_t>>> items;
  for (const auto& r : records) items[r.setting][field_of(r, spec.column_field)].push_back(to_nano(percent_score(r)));

  ScoreMatrix m;
  m.title = spec.title;
  m.columns = spec.columns;
  if (m.columns.empty()) {
    std::set<std::string> values;
    for (const auto& [row, by_value] : items)
      for (const auto& [value, _] : by_value) values.insert(value);
    for (const auto& v : values) m.columns.push_back({v, v, {v}, false});
  }
  std::vector<std::string> rows = spec.row_order;
  if (rows.empty())
    for (const auto& [row, _] : items) rows.push_back(row);

  for (const auto& row : rows) {
    const auto it = items.find(row);
    if (it == items.end()) continue;
    std::vector<std::optional<Cell>> cells;
    for (const auto& col : m.columns) {
      std::int64_t mean_sum = 0;
      std::size_t members = 0;
      std::size_t count = 0;
      for (const auto& member : col.members) {
        const auto v = it->second.find(member);
        if (v == it->second.end() || v->second.empty()) continue;
        std::vector<std::int64_t> scores = v->second;
        std::sort(scores.begin(), scores.end());
        std::int64_t sum = 0;
        for (auto s : scores) sum += s;
        mean_sum += div_round(sum, static_cast<std::int64_t>(scores.size()));
        ++members;
        count += scores.size();
      }
      if (members == 0) {
        cells.emplace_back(std::nullopt);
        continue;
      }
      cells.push_back(Cell{div_round(mean_sum, static_cast<std::int64_t>(members)), count, Mark::none});
    }
    m.row_ids.push_back(row);
    const auto label = spec.row_labels.find(row);
    m.row_labels.push_back(label == spec.row_labels.end() ? row : label->second);
    m.cells.push_back(std::move(cells));
  }
  return m;
}

ScoreMatrix mark_best(ScoreMatrix m) {
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    std::vector<std::int64_t> tenths;
    for (auto& row : m.cells)
      if (row[c]) {
        row[c]->mark = Mark::none;
        tenths.push_back(div_round(row[c]->nano, kNanoPerPoint / 10));
      }
    if (tenths.empty()) continue;
    std::sort(tenths.begin(), tenths.end(), std::greater<>());
    const std::int64_t best = tenths.front();
    const bool tied_best = tenths.size() > 1 && tenths[1] == best;
    std::optional<std::int64_t> second;
    if (!tied_best)
      for (auto t : tenths)
        if (t < best) {
          second = t;
          break;
        }
    for (auto& row : m.cells) {
      if (!row[c]) continue;
      const std::int64_t t = div_round(row[c]->nano, kNanoPerPoint / 10);
      if (t == best) row[c]->mark = Mark::best;
      else if (second && t == *second) row[c]->mark = Mark::second;
    }
  }
  return m;
}

ScoreMatrix delta_vs_baseline(const ScoreMatrix& matrix, std::string_view baseline_row) {
  const std::size_t b = matrix.row_index(baseline_row);
  ScoreMatrix out = matrix;
  for (auto& col : out.columns) col.significant = false;
  for (std::size_t r = 0; r < out.cells.size(); ++r)
    for (std::size_t c = 0; c < out.columns.size(); ++c) {
      auto& cell = out.cells[r][c];
      const auto& base = matrix.cells[b][c];
      if (!cell || !base) {
        cell.reset();
        continue;
      }
      cell->nano = matrix.cells[r][c]->nano - base->nano;
      cell->mark = Mark::none;
    }
  return out;
}

std::string format_points(std::int64_t nano, bool signed_values) {
  const std::int64_t tenths = div_round(nano, kNanoPerPoint / 10);
  const std::int64_t whole = std::abs(tenths) / 10;
  const std::int64_t frac = std::abs(tenths) % 10;
  std::string sign = tenths < 0 ? "-" : (signed_values && tenths > 0 ? "+" : "");
  return sign + std::to_string(whole) + "." + std::to_string(frac);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string exact_points(std::int64_t nano) {
  const std::int64_t whole = std::abs(nano) / kNanoPerPoint;
  std::string frac = std::to_string(std::abs(nano) % kNanoPerPoint);
  frac.insert(0, 9 - frac.size(), '0');
  return (nano < 0 ? "-" : "") + std::to_string(whole) + "." + frac;
}

std::string render_markdown(const ScoreMatrix& m, const RenderOptions& o) {
  std::string out;
  if (!m.title.empty()) out += "### " + m.title + "\n\n";
  out += "| " + o.row_header + " |";
  for (const auto& c : m.columns) out += " " + c.label + (c.significant ? "*" : "") + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < m.columns.size(); ++i) out += "---:|";
  out += "\n";
  for (std::size_t r = 0; r < m.row_ids.size(); ++r) {
    out += "| " + m.row_labels[r] + " |";
    for (const auto& cell : m.cells[r]) {
      if (!cell) {
        out += " - |";
        continue;
      }
      std::string v = format_points(cell->nano, o.signed_values);
      if (cell->mark == Mark::best) v = "**" + v + "**";
      else if (cell->mark == Mark::second) v = "<u>" + v + "</u>";
      out += " " + v + " |";
    }
    out += "\n";
  }
  return out;
}

std::string render_csv(const ScoreMatrix& m) {
  std::string out = "table,row_id,row_label,column_id,column_label,value,count,mark,significant\n";
  for (std::size_t r = 0; r < m.row_ids.size(); ++r)
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
      const auto& cell = m.cells[r][c];
      out += csv_field(m.title) + "," + csv_field(m.row_ids[r]) + "," + csv_field(m.row_labels[r]) + "," +
             csv_field(m.columns[c].id) + "," + csv_field(m.columns[c].label) + ",";
      if (cell)
        out += exact_points(cell->nano) + "," + std::to_string(cell->count) + "," + std::string(to_string(cell->mark));
      else
        out += ",0,none";
      out += std::string(",") + (m.columns[c].significant ? "true" : "false") + "\n";
    }
  return out;
}

}  // namespace

json to_json(const ScoreMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.row_ids.size(); ++r) rows.push_back({{"id", m.row_ids[r]}, {"label", m.row_labels[r]}});
  json cols = json::array();
  for (const auto& c : m.columns)
    cols.push_back({{"id", c.id}, {"label", c.label}, {"members", c.members}, {"significant", c.significant}});
  json cells = json::array();
  for (const auto& row : m.cells) {
    json jr = json::array();
    for (const auto& cell : row)
      jr.push_back(cell ? json{{"nano", cell->nano},
                               {"value", exact_points(cell->nano)},
                               {"count", cell->count},
                               {"mark", to_string(cell->mark)}}
                        : json(nullptr));
    cells.push_back(jr);
  }
  return {{"title", m.title}, {"rows", rows}, {"columns", cols}, {"cells", cells}};
}

ScoreMatrix matrix_from_json(const json& j) {
  ScoreMatrix m;
  m.title = j.at("title").get<std::string>();
  for (const auto& r : j.at("rows")) {
    m.row_ids.push_back(r.at("id").get<std::string>());
    m.row_labels.push_back(r.at("label").get<std::string>());
  }
  for (const auto& c : j.at("columns"))
    m.columns.push_back({c.at("id").get<std::string>(), c.at("label").get<std::string>(),
                         c.at("members").get<std::vector<std::string>>(), c.at("significant").get<bool>()});
  for (const auto& row : j.at("cells")) {
    std::vector<std::optional<Cell>> cells;
    for (const auto& cell : row) {
      if (cell.is_null()) {
        cells.emplace_back(std::nullopt);
        continue;
      }
      cells.push_back(Cell{cell.at("nano").get<std::int64_t>(), cell.at("count").get<std::size_t>(),
                           parse_mark(cell.at("mark").get<std::string>())});
    }
    if (cells.size() != m.columns.size()) throw std::invalid_argument("matrix json: row width differs from columns");
    m.cells.push_back(std::move(cells));
  }
  if (m.cells.size() != m.row_ids.size()) throw std::invalid_argument("matrix json: cell rows differ from rows");
  return m;
}

std::string render(const ScoreMatrix& matrix, RenderFormat format, const RenderOptions& options) {
  switch (format) {
    case RenderFormat::markdown: return render_markdown(matrix, options);
    case RenderFormat::csv: return render_csv(matrix);
    case RenderFormat::json: return to_json(matrix).dump(2) + "\n";
  }
  return {};
}

}  // namespace csicl
